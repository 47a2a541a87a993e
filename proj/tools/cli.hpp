#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aml/aml.hpp"

namespace aml::cli {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2 };

struct RunConfig {
  std::string config_path;

  // shared
  std::string seed = "1";
  std::string problem = "bars";
  std::string dims = "7x7";
  double noise = 0.1;
  std::string out;
  std::string csv;

  // train
  std::size_t examples = 10000;
  int epochs = 0;
  std::size_t batch = 1000;
  std::string protocol = "fixed";
  std::size_t max_batch = 2000;
  bool exhaustive = false;
  int stop_after = 0;
  std::size_t test_size = 1000;
  int reduce_every = 1;
  std::size_t pinning_cap = 0;
  std::size_t keep = 10;
  std::string save_kept;
  int replicas = 1;
  std::string idx_images;
  std::string idx_labels;
  int digit = 0;
  int threshold = 128;

  // eval
  std::vector<std::string> models;
  std::size_t count = 1000;
  int vote_threshold = 0;
  int misses_cutoff = -1;

  // queens
  int size = 8;
  std::string blocked;
  std::string schedule = "periodic";
  bool insert = false;
  bool stop_on_solution = false;
  std::size_t max_trace_iterations = 100;
  std::string export_relations;

  // exact-oracle
  int rows = 3;
  int cols = 2;
  std::size_t cap = 1000000;

  // gen-data
  std::string relations;

  // theory
  bool pred_error = false;
  bool required_atoms = false;
  double constants = -1;
  int d = 0;
  double kappa = 0;
  int bar_length = 0;
  double fpr = 0;
};

namespace detail {

inline std::pair<int, int> parse_dims(const std::string& s) {
  auto x = s.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--dims", "expected WxH, got " + s);
  try {
    int w = std::stoi(s.substr(0, x)), h = std::stoi(s.substr(x + 1));
    if (w < 1 || h < 1) throw std::invalid_argument("non-positive");
    return {w, h};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--dims", "expected WxH, got " + s);
  }
}

inline std::uint64_t resolve_seed(const std::string& s) {
  if (s == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  try {
    std::size_t used = 0;
    auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--seed", "expected an integer or 'random', got " + s);
  }
}

inline BarLabeler labeler_for(const std::string& problem) {
  if (problem == "bars") return BarLabeler::HasVerticalBar;
  if (problem == "parity") return BarLabeler::ParityOfBars;
  throw CLI::ValidationError("--problem", "expected bars or parity, got " + problem);
}

inline bool label_of(BarLabeler l, const BinaryImage& img) {
  return l == BarLabeler::HasVerticalBar ? has_vertical_bar(img) : complete_bar_count(img) % 2 == 0;
}

// Writes to a file, or to `out` when the path is "-".
inline void with_output(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& fn) {
  if (path == "-") return fn(out);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  fn(f);
}

// Image size from the pixel constants of a snapshot.
inline std::pair<int, int> snapshot_dims(const ModelSnapshot& snap) {
  int w = 0, h = 0;
  for (const auto& n : snap.constants) {
    int r = 0, c = 0;
    char color = 0;
    if (std::sscanf(n.c_str(), "pr%dc%d%c", &r, &c, &color) == 3) {
      h = std::max(h, r + 1);
      w = std::max(w, c + 1);
    }
  }
  if (w == 0) throw Error(ErrorCode::UnknownConstant, "model has no pixel constants");
  return {w, h};
}

inline std::vector<Square> parse_blocked(const std::string& s) {
  std::vector<Square> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_square(item));
  return out;
}

}  // namespace detail

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
      app_ = make_app();
      auto& app = app_;
      if (auto path = config_path(args)) {
        auto extra = config_args(*app, args, *path);
        args.insert(args.end(), extra.begin(), extra.end());
      }
      std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
      app->parse(args);
      return dispatch(*app_);
    } catch (const CLI::ParseError& e) {
      int code = app_->exit(e, out_, err_);
      if (code == 0) return kOk;
      auto subs = app_->get_subcommands();
      err_ << (subs.empty() ? app_->help() : subs.front()->help());
      return kUsage;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      return kDataError;
    } catch (const nlohmann::json::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kDataError;
    }
  }

 private:
  std::unique_ptr<CLI::App> make_app() {
    auto app = std::make_unique<CLI::App>("Algebraic machine learning with semilattices", "aml");
    app->require_subcommand(1, 1);
    app->set_help_all_flag("--help-all");

    auto seeded = [&](CLI::App* sub) {
      sub->add_option("--seed", cfg_.seed, "integer seed, or 'random'")->capture_default_str();
      sub->add_option("--config", cfg_.config_path, "key=value file; flags win");
    };

    auto* train = app->add_subcommand("train", "train a classifier on an image problem");
    seeded(train);
    train->add_option("--problem", cfg_.problem, "bars, parity or idx")->capture_default_str();
    train->add_option("--dims", cfg_.dims, "image size WxH")->capture_default_str();
    train->add_option("--noise", cfg_.noise, "background noise")->check(CLI::Range(0.0, 0.999))->capture_default_str();
    train->add_option("--examples", cfg_.examples, "training examples in total")->capture_default_str();
    train->add_option("--epochs", cfg_.epochs, "epochs (overrides --examples)");
    train->add_option("--batch", cfg_.batch, "batch size")->check(CLI::PositiveNumber)->capture_default_str();
    train->add_option("--protocol", cfg_.protocol, "fixed, grow or test-error")
        ->check(CLI::IsMember({"fixed", "grow", "test-error"}))
        ->capture_default_str();
    train->add_option("--max-batch", cfg_.max_batch, "batch size cap")->capture_default_str();
    train->add_flag("--exhaustive", cfg_.exhaustive, "train on every image of the grid");
    train->add_option("--stop-after", cfg_.stop_after, "stop after this many epochs with zero batch error");
    train->add_option("--test-size", cfg_.test_size, "held-out examples")->capture_default_str();
    train->add_option("--reduce-every", cfg_.reduce_every, "epoch stride of the reduction")->capture_default_str();
    train->add_option("--pinning-cap", cfg_.pinning_cap, "max pinning relations enforced per epoch (0: all)");
    train->add_option("--keep", cfg_.keep, "snapshots retained")->capture_default_str();
    train->add_option("--save-kept", cfg_.save_kept, "directory for the retained snapshots");
    train->add_option("--replicas", cfg_.replicas, "independent runs in parallel")->check(CLI::PositiveNumber);
    train->add_option("--images", cfg_.idx_images, "IDX image file (problem idx)");
    train->add_option("--labels", cfg_.idx_labels, "IDX label file (problem idx)");
    train->add_option("--digit", cfg_.digit, "positive class (problem idx)");
    train->add_option("--threshold", cfg_.threshold, "binarization threshold")->capture_default_str();
    train->add_option("--out", cfg_.out, "model JSON of the last epoch");
    train->add_option("--csv", cfg_.csv, "per-epoch metrics CSV ('-' for stdout)");

    auto* eval = app->add_subcommand("eval", "evaluate saved models");
    seeded(eval);
    eval->add_option("--model", cfg_.models, "model JSON (repeat to vote)")->required();
    eval->add_option("--problem", cfg_.problem, "bars, parity or idx")->capture_default_str();
    eval->add_option("--noise", cfg_.noise, "background noise")->check(CLI::Range(0.0, 0.999))->capture_default_str();
    eval->add_option("--count", cfg_.count, "examples")->capture_default_str();
    eval->add_option("--vote-threshold", cfg_.vote_threshold, "votes needed for a positive (default: majority)");
    eval->add_option("--misses-cutoff", cfg_.misses_cutoff, "classify by pinning misses instead");
    eval->add_option("--images", cfg_.idx_images, "IDX image file (problem idx)");
    eval->add_option("--labels", cfg_.idx_labels, "IDX label file (problem idx)");
    eval->add_option("--digit", cfg_.digit, "positive class (problem idx)");
    eval->add_option("--threshold", cfg_.threshold, "binarization threshold")->capture_default_str();

    auto* queens = app->add_subcommand("queens", "complete an N-queens board");
    seeded(queens);
    queens->add_option("--size", cfg_.size, "board size")->capture_default_str();
    queens->add_option("--blocked", cfg_.blocked, "fixed queens, e.g. b4,d5");
    queens->add_option("--epochs", cfg_.epochs, "epochs for the periodic schedule");
    queens->add_option("--schedule", cfg_.schedule, "'periodic' or letters N/I/Z with counts, e.g. 7I3Z")
        ->capture_default_str();
    queens->add_flag("--insert", cfg_.insert, "periodic schedule inserts a legal queen each active epoch");
    queens->add_flag("--stop-on-solution", cfg_.stop_on_solution, "stop at the first valid board");
    queens->add_option("--max-trace-iterations", cfg_.max_trace_iterations, "trace enforcement pass limit")
        ->capture_default_str();
    queens->add_option("--export-relations", cfg_.export_relations, "write the encoded relations and exit");
    queens->add_option("--out", cfg_.out, "model JSON of the last epoch");

    auto* oracle = app->add_subcommand("exact-oracle", "check the exact vertical-bar atomization");
    oracle->add_option("--config", cfg_.config_path, "key=value file; flags win");
    oracle->add_option("--rows", cfg_.rows, "grid rows")->check(CLI::PositiveNumber)->capture_default_str();
    oracle->add_option("--cols", cfg_.cols, "grid columns")->check(CLI::PositiveNumber)->capture_default_str();
    oracle->add_option("--cap", cfg_.cap, "maximum atom count")->capture_default_str();
    oracle->add_option("--out", cfg_.out, "fingerprints as model JSON");

    auto* gen = app->add_subcommand("gen-data", "generate bar images");
    seeded(gen);
    gen->add_option("--problem", cfg_.problem, "bars or parity")->capture_default_str();
    gen->add_option("--dims", cfg_.dims, "image size WxH")->capture_default_str();
    gen->add_option("--noise", cfg_.noise, "background noise")->check(CLI::Range(0.0, 0.999))->capture_default_str();
    gen->add_option("--count", cfg_.count, "examples")->capture_default_str();
    gen->add_option("--images", cfg_.idx_images, "IDX image output");
    gen->add_option("--labels", cfg_.idx_labels, "IDX label output");
    gen->add_option("--relations", cfg_.relations, "relation text output ('-' for stdout)");

    auto* theory = app->add_subcommand("theory", "closed-form predictions");
    theory->add_option("--config", cfg_.config_path, "key=value file; flags win");
    theory->add_flag("--pred-error", cfg_.pred_error, "predicted error from C or d and kappa");
    theory->add_flag("--required-atoms", cfg_.required_atoms, "atoms needed for a target false-positive rate");
    theory->add_option("--constants", cfg_.constants, "constant count C");
    theory->add_option("--d", cfg_.d, "side of a symmetric d x d problem");
    theory->add_option("--kappa", cfg_.kappa, "compression ratio");
    theory->add_option("--noise", cfg_.noise, "background noise");
    theory->add_option("--bar-length", cfg_.bar_length, "pixels per bar");
    theory->add_option("--fpr", cfg_.fpr, "target false-positive rate");

    return app;
  }

  static std::optional<std::string> config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
  }

  static bool given(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  }

  // Config entries for options not given on the command line, as argv tokens.
  std::vector<std::string> config_args(CLI::App& app, const std::vector<std::string>& args, const std::string& path) {
    if (args.empty()) throw CLI::CallForHelp();
    auto* sub = app.get_subcommand_no_throw(args.front());
    if (!sub) throw CLI::ExtrasError("expected a subcommand before --config", args);
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    std::vector<std::string> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--config", "line " + std::to_string(n) + ": expected key=value");
      auto key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      auto* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
      if (!opt) throw CLI::ValidationError("--config", "unknown key '" + key + "'");
      if (given(args, "--" + key)) continue;
      if (opt->get_expected_min() == 0) {
        if (value == "true" || value == "1") out.push_back("--" + key);
        else if (value != "false" && value != "0")
          throw CLI::ValidationError("--config", key + " expects true or false");
      } else {
        out.push_back("--" + key);
        out.push_back(value);
      }
    }
    return out;
  }

  int dispatch(CLI::App& app) {
    auto name = app.get_subcommands().front()->get_name();
    if (name == "train") return train();
    if (name == "eval") return eval();
    if (name == "queens") return queens();
    if (name == "exact-oracle") return exact_oracle();
    if (name == "gen-data") return gen_data();
    return theory();
  }

  struct ReplicaResult {
    std::vector<ExperimentRecord> records;
    std::vector<ModelSnapshot> kept;
  };

  ReplicaResult train_replica(std::uint64_t seed) const {
    ReplicaResult res;
    std::vector<LabeledExample> pool, test;
    int w = 0, h = 0;
    BarLabeler labeler = BarLabeler::HasVerticalBar;
    if (cfg_.problem == "idx") {
      if (cfg_.idx_images.empty() || cfg_.idx_labels.empty())
        throw CLI::ValidationError("--images", "problem idx needs --images and --labels");
      auto ds = load_idx(cfg_.idx_images, cfg_.idx_labels, cfg_.threshold);
      pool = one_vs_rest(ds, static_cast<std::uint8_t>(cfg_.digit));
      if (pool.empty()) throw Error(ErrorCode::CountMismatch, "empty IDX data set");
      w = pool.front().image.width;
      h = pool.front().image.height;
      Rng(seed).shuffle(pool);
      auto n_test = std::min(cfg_.test_size, pool.size() / 5);
      test.assign(pool.end() - static_cast<std::ptrdiff_t>(n_test), pool.end());
      pool.resize(pool.size() - n_test);
    } else {
      labeler = detail::labeler_for(cfg_.problem);
      std::tie(w, h) = detail::parse_dims(cfg_.dims);
      if (cfg_.exhaustive) {
        if (w * h > 20) throw CLI::ValidationError("--exhaustive", "grid too large to enumerate");
        for (auto& img : all_images(w, h)) pool.push_back({img, detail::label_of(labeler, img)});
        test = pool;
      } else {
        test = gen_bar_images(w, h, cfg_.noise, labeler, cfg_.test_size, seed ^ 0x9e3779b97f4a7c15ULL);
      }
    }

    SupervisedLearner learner(w, h, seed);
    learner.reduce_every = cfg_.reduce_every;
    learner.pinning_cap = cfg_.pinning_cap;

    std::uint64_t stream_seed = seed;
    std::size_t cursor = 0;
    bool synthetic = cfg_.problem != "idx" && !cfg_.exhaustive;
    ExampleStream stream = [&](std::size_t n) {
      if (synthetic) return gen_bar_images(w, h, cfg_.noise, labeler, n, ++stream_seed);
      if (cfg_.exhaustive) return pool;
      std::vector<LabeledExample> out;
      for (std::size_t i = 0; i < n && !pool.empty(); ++i) out.push_back(pool[cursor++ % pool.size()]);
      return out;
    };

    FitProtocol p;
    p.rule = cfg_.protocol == "grow" ? BatchRule::GrowOnStagnation
             : cfg_.protocol == "test-error" ? BatchRule::TestErrorDirection
                                             : BatchRule::Fixed;
    p.batch_size = cfg_.batch;
    p.max_batch = cfg_.max_batch;
    p.keep = cfg_.keep;
    p.stop_after_zero_error = cfg_.stop_after;
    p.max_epochs = cfg_.epochs > 0 ? cfg_.epochs
                   : cfg_.exhaustive ? 5
                                     : static_cast<int>(std::max<std::size_t>(1, cfg_.examples / cfg_.batch));
    p.test_error = [&](const ModelSnapshot& s) { return learner.error_rate(s, test); };
    std::vector<LabeledExample> seen;
    p.on_epoch = [&](const EpochReport& r) {
      seen.insert(seen.end(), r.batch->begin(), r.batch->end());
      auto rec = record_epoch(*r.snapshot, learner.class_constant(), learner.encoder(), test, distinct_examples(seen),
                              learner.error_rate(*r.snapshot, *r.batch));
      rec.seed = seed;
      res.records.push_back(rec);
    };
    res.kept = fit(learner, stream, p);
    return res;
  }

  int train() {
    auto base = detail::resolve_seed(cfg_.seed);
    out_ << "seed: " << base << "\n";
    std::vector<ReplicaResult> results(static_cast<std::size_t>(cfg_.replicas));
    std::vector<std::exception_ptr> errors(results.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < results.size(); ++i)
      workers.emplace_back([&, i] {
        try {
          results[i] = train_replica(base + i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (auto& t : workers) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      if (r.records.empty()) continue;
      const auto& last = r.records.back();
      out_ << "replica " << i << " seed " << last.seed << ": epochs " << r.records.size() << ", atoms " << last.atoms
           << ", train error " << last.train_error << ", test error " << last.test_error << "\n";
      if (!cfg_.out.empty()) {
        auto path = results.size() == 1 ? cfg_.out : cfg_.out + "." + std::to_string(i);
        save_snapshot(r.kept.back(), path);
      }
      if (!cfg_.save_kept.empty()) {
        std::filesystem::create_directories(cfg_.save_kept);
        for (const auto& s : r.kept)
          save_snapshot(s, cfg_.save_kept + "/r" + std::to_string(i) + "_e" + std::to_string(s.epoch) + ".json");
      }
    }
    if (!cfg_.csv.empty())
      detail::with_output(cfg_.csv, out_, [&](std::ostream& o) {
        std::vector<ExperimentRecord> all;
        for (const auto& r : results) all.insert(all.end(), r.records.begin(), r.records.end());
        write_csv(o, all);
      });
    return kOk;
  }

  int eval() {
    std::vector<ModelSnapshot> models;
    for (const auto& path : cfg_.models) models.push_back(load_snapshot(path));
    auto [w, h] = detail::snapshot_dims(models.front());
    auto enc = ImageEncoder::lookup(models.front().constants, w, h);
    auto cls = models.front().constant_index("v");
    if (!cls) throw Error(ErrorCode::UnknownConstant, "model has no class constant v");
    for (const auto& m : models)
      if (m.constants != models.front().constants) throw Error(ErrorCode::MixedAlgebras, "models differ in constants");

    std::vector<LabeledExample> data;
    if (cfg_.problem == "idx") {
      data = one_vs_rest(load_idx(cfg_.idx_images, cfg_.idx_labels, cfg_.threshold), static_cast<std::uint8_t>(cfg_.digit));
    } else {
      auto seed = detail::resolve_seed(cfg_.seed);
      out_ << "seed: " << seed << "\n";
      data = gen_bar_images(w, h, cfg_.noise, detail::labeler_for(cfg_.problem), cfg_.count, seed);
    }
    int threshold = cfg_.vote_threshold > 0 ? cfg_.vote_threshold : static_cast<int>(models.size() / 2 + 1);
    auto pinning = models.front().pinning;
    std::size_t wrong = 0, fp = 0, fn = 0;
    for (const auto& ex : data) {
      auto q = enc.encode(ex.image);
      bool yes = cfg_.misses_cutoff >= 0
                     ? misses_classify(pinning, static_cast<std::uint32_t>(*cls), q, static_cast<std::size_t>(cfg_.misses_cutoff))
                     : vote(models, static_cast<std::uint32_t>(*cls), q, threshold).decision;
      wrong += yes != ex.label;
      fp += yes && !ex.label;
      fn += !yes && ex.label;
    }
    double rate = data.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(data.size());
    out_ << "examples: " << data.size() << "\nerror: " << rate << "\nfalse positives: " << fp
         << "\nfalse negatives: " << fn << "\n";
    return kOk;
  }

  int queens() {
    BoardSpec spec{cfg_.size, detail::parse_blocked(cfg_.blocked)};
    auto seed = detail::resolve_seed(cfg_.seed);
    AlgebraState st(seed);
    if (!cfg_.export_relations.empty()) {
      validate_spec(spec);
      auto layout = QueensLayout::install(st, spec.size);
      auto enc = encode_queens(st, layout, spec);
      detail::with_output(cfg_.export_relations, out_, [&](std::ostream& o) { o << format_relations(st, enc.all()); });
      return kOk;
    }
    out_ << "seed: " << seed << "\n";
    int epochs = cfg_.epochs > 0 ? cfg_.epochs : 30;
    auto schedule = cfg_.schedule == "periodic"
                        ? QueensSchedule::periodic_idle(epochs, cfg_.insert ? EpochKind::Insert : EpochKind::Normal)
                        : QueensSchedule::parse(cfg_.schedule);
    std::optional<ModelSnapshot> last;
    int solved_at = 0;
    queens_protocol(
        st, spec, schedule,
        [&](const BoardReport& r, const ModelSnapshot& snap) {
          out_ << "epoch " << r.epoch << " (" << to_string(r.kind);
          if (r.inserted) out_ << " " << r.inserted->name() << (r.insert_rejected ? " rejected" : "");
          out_ << ") atoms " << r.atoms << (r.solved ? " solved" : "") << "\n" << r.board.render();
          last = snap;
          if (r.solved && !solved_at) solved_at = r.epoch;
          return !(r.solved && cfg_.stop_on_solution);
        },
        cfg_.max_trace_iterations);
    if (solved_at) out_ << "complete board at epoch " << solved_at << "\n";
    else out_ << "no complete board\n";
    if (!cfg_.out.empty() && last) save_snapshot(*last, cfg_.out);
    return kOk;
  }

  int exact_oracle() {
    AlgebraState st(0);
    auto enc = ImageEncoder::install(st, cfg_.cols, cfg_.rows);
    auto v = st.add_constant("v");
    auto atoms = exact_vertical_bar_atomization(cfg_.rows, cfg_.cols, enc, v.index, cfg_.cap);
    out_ << "atoms: " << atoms.size() << "\n";
    if (!cfg_.out.empty()) {
      for (const auto& fp : atoms) st.add_atom_with_fingerprint(fp);
      save_snapshot(take_snapshot(st, 0), cfg_.out);
    }
    if (cfg_.rows * cfg_.cols > 20) {
      out_ << "grid too large for exhaustive checking\n";
      return kOk;
    }
    ModelSnapshot snap = take_snapshot(st, 0);
    snap.atoms = atoms;
    std::size_t mismatches = 0, total = 0;
    for (const auto& img : all_images(cfg_.cols, cfg_.rows)) {
      ++total;
      mismatches += contains(snap, v.index, enc.encode(img)) != has_vertical_bar(img);
    }
    out_ << "images: " << total << "\nmismatches: " << mismatches << "\n";
    return mismatches == 0 ? kOk : kDataError;
  }

  int gen_data() {
    auto seed = detail::resolve_seed(cfg_.seed);
    auto [w, h] = detail::parse_dims(cfg_.dims);
    auto data = gen_bar_images(w, h, cfg_.noise, detail::labeler_for(cfg_.problem), cfg_.count, seed);
    out_ << "seed: " << seed << "\n";
    if (!cfg_.idx_images.empty()) {
      std::vector<std::vector<std::uint8_t>> imgs;
      for (const auto& ex : data) {
        std::vector<std::uint8_t> px(ex.image.pixels.size());
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = ex.image.pixels[i] ? 255 : 0;
        imgs.push_back(std::move(px));
      }
      write_idx_images(cfg_.idx_images, static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w), imgs);
    }
    if (!cfg_.idx_labels.empty()) {
      std::vector<std::uint8_t> labels;
      for (const auto& ex : data) labels.push_back(ex.label ? 1 : 0);
      write_idx_labels(cfg_.idx_labels, labels);
    }
    if (!cfg_.relations.empty()) {
      AlgebraState st(seed);
      auto enc = ImageEncoder::install(st, w, h);
      auto v = st.add_constant("v");
      std::vector<Relation> rels;
      for (const auto& ex : data) rels.push_back(enc.relation(st, v, ex));
      detail::with_output(cfg_.relations, out_, [&](std::ostream& o) { o << format_relations(st, rels); });
    }
    out_ << "examples: " << data.size() << "\n";
    return kOk;
  }

  int theory() {
    if (cfg_.pred_error == cfg_.required_atoms)
      throw CLI::ValidationError("theory", "choose exactly one of --pred-error and --required-atoms");
    if (cfg_.pred_error) {
      if (cfg_.kappa <= 0) throw CLI::ValidationError("--kappa", "must be positive");
      if (cfg_.d > 0) out_ << predicted_error_symmetric(cfg_.d, cfg_.kappa) << "\n";
      else if (cfg_.constants >= 0) out_ << predicted_error(cfg_.constants, cfg_.kappa) << "\n";
      else throw CLI::ValidationError("--pred-error", "needs --constants or --d");
      return kOk;
    }
    if (cfg_.noise <= 0 || cfg_.noise >= 1 || cfg_.bar_length < 1 || cfg_.fpr <= 0)
      throw CLI::ValidationError("--required-atoms", "needs 0<noise<1, bar-length >= 1 and fpr > 0");
    out_ << required_atom_count(cfg_.noise, cfg_.bar_length, cfg_.fpr) << "\n";
    return kOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  RunConfig cfg_;
  std::unique_ptr<CLI::App> app_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace aml::cli
