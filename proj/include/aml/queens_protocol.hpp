#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aml/problems/queens.hpp"
#include "aml/trainer.hpp"

namespace aml {

enum class EpochKind {
  Normal,  // rule set and game relations
  Insert,  // as Normal, plus Q<S for one random legal square
  Idle     // rule set only
};

// One kind per epoch. Text form: one letter per epoch (N, I, Z for idle),
// optionally run-length prefixed, e.g. "7N3Z".
struct QueensSchedule {
  std::vector<EpochKind> epochs;

  static QueensSchedule parse(const std::string& text) {
    QueensSchedule s;
    int count = 0;
    bool have_count = false;
    for (char ch : text) {
      if (ch >= '0' && ch <= '9') {
        count = count * 10 + (ch - '0');
        have_count = true;
        continue;
      }
      EpochKind k;
      switch (ch) {
        case 'N': k = EpochKind::Normal; break;
        case 'I': k = EpochKind::Insert; break;
        case 'Z': k = EpochKind::Idle; break;
        default: throw Error(ErrorCode::ParseError, std::string("bad schedule letter '") + ch + "'");
      }
      s.epochs.insert(s.epochs.end(), have_count ? count : 1, k);
      count = 0;
      have_count = false;
    }
    if (have_count) throw Error(ErrorCode::ParseError, "schedule ends with a count");
    return s;
  }

  // Idle epochs 8-10, 19-21, 30-32, ...; `base` elsewhere.
  static QueensSchedule periodic_idle(int epochs, EpochKind base = EpochKind::Normal) {
    QueensSchedule s;
    for (int e = 1; e <= epochs; ++e) s.epochs.push_back(e >= 8 && (e - 8) % 11 < 3 ? EpochKind::Idle : base);
    return s;
  }

  // `inserts` insert epochs followed by `idle` idle epochs, repeated.
  static QueensSchedule attempts(int inserts, int idle, int repeats) {
    QueensSchedule s;
    for (int r = 0; r < repeats; ++r) {
      s.epochs.insert(s.epochs.end(), inserts, EpochKind::Insert);
      s.epochs.insert(s.epochs.end(), idle, EpochKind::Idle);
    }
    return s;
  }
};

struct BoardReport {
  int epoch = 0;
  EpochKind kind = EpochKind::Normal;
  std::optional<Square> inserted;
  bool insert_rejected = false;  // the inserted queen made the epoch inconsistent
  Board board;
  bool solved = false;  // fully decided and valid
  std::size_t atoms = 0;
};

inline bool board_solved(const Board& b) {
  if (!b.decided()) return false;
  return validate_board(b);
}

// Runs the schedule on a fresh board algebra held in `st`. The callback sees
// every report; returning false stops the run.
inline std::vector<BoardReport> queens_protocol(AlgebraState& st, const BoardSpec& spec, const QueensSchedule& schedule,
                                                const std::function<bool(const BoardReport&, const ModelSnapshot&)>& on_epoch = {},
                                                std::size_t max_trace_iterations = 100) {
  validate_spec(spec);
  auto layout = QueensLayout::install(st, spec.size);
  auto enc = encode_queens(st, layout, spec);
  PinningStructure pinning;
  std::vector<BoardReport> out;
  Board current{spec.size, std::vector<Cell>(static_cast<std::size_t>(spec.size) * spec.size, Cell::Unknown)};

  for (std::size_t i = 0; i < schedule.epochs.size(); ++i) {
    BoardReport rep;
    rep.epoch = static_cast<int>(i) + 1;
    rep.kind = schedule.epochs[i];

    EpochConfig cfg;
    cfg.epoch = rep.epoch;
    cfg.retire_batch_terms = false;
    cfg.max_trace_iterations = max_trace_iterations;
    cfg.batch = enc.rules;
    if (rep.kind != EpochKind::Idle) cfg.batch.insert(cfg.batch.end(), enc.game.begin(), enc.game.end());
    if (rep.kind == EpochKind::Insert) {
      std::vector<Square> extra;
      for (auto b : spec.blocked)
        if (current.at(b) != Cell::Queen) extra.push_back(b);
      auto legal = legal_squares(current, extra);
      if (!legal.empty()) {
        rep.inserted = st.rng().pick(legal);
        cfg.batch.push_back(Relation::pos(ElementRef::constant(layout.q(*rep.inserted)), ElementRef::constant(layout.s)));
      }
    }

    // An inserted queen that no completion contains makes the epoch
    // inconsistent; the epoch is then rerun without it.
    std::optional<ModelSnapshot> snap;
    if (rep.inserted) {
      AlgebraState saved_state = st;
      PinningStructure saved_pinning = pinning;
      try {
        snap = train_epoch(st, cfg, pinning);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InconsistentInput && e.code() != ErrorCode::InconsistentTrainingSet) throw;
        st = std::move(saved_state);
        pinning = std::move(saved_pinning);
        cfg.batch.pop_back();
        rep.insert_rejected = true;
      }
    }
    if (!snap) snap = train_epoch(st, cfg, pinning);
    rep.board = read_board(*snap, spec);
    rep.solved = board_solved(rep.board);
    rep.atoms = snap->atoms.size();
    current = rep.board;
    out.push_back(rep);
    if (on_epoch && !on_epoch(out.back(), *snap)) break;
  }
  return out;
}

inline std::string to_string(EpochKind k) {
  switch (k) {
    case EpochKind::Normal: return "normal";
    case EpochKind::Insert: return "insert";
    case EpochKind::Idle: return "idle";
  }
  return "?";
}

}  // namespace aml
