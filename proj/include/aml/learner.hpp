#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "aml/inference.hpp"
#include "aml/problems/images.hpp"
#include "aml/trainer.hpp"

namespace aml {

// Drops repeated images; an image seen with both labels is dropped entirely.
inline std::vector<LabeledExample> distinct_examples(const std::vector<LabeledExample>& batch) {
  std::map<std::vector<std::uint8_t>, int> seen;  // bit 0: positive, bit 1: negative
  for (const auto& ex : batch) seen[ex.image.pixels] |= ex.label ? 1 : 2;
  std::vector<LabeledExample> out;
  for (const auto& ex : batch) {
    auto it = seen.find(ex.image.pixels);
    if (it == seen.end() || it->second == 3) continue;
    out.push_back(ex);
    seen.erase(it);
  }
  return out;
}

// Binary image classifier: pixel constants plus one class constant "v".
class SupervisedLearner {
 public:
  SupervisedLearner(int width, int height, std::uint64_t seed) : state_(seed) {
    encoder_ = ImageEncoder::install(state_, width, height);
    class_constant_ = state_.add_constant("v");
  }

  ModelSnapshot train(const std::vector<LabeledExample>& batch, EpochStats* stats = nullptr) {
    auto examples = distinct_examples(batch);
    EpochConfig cfg;
    cfg.epoch = ++epoch_;
    cfg.reduce_every = reduce_every;
    cfg.pinning_cap = pinning_cap;
    cfg.max_trace_iterations = max_trace_iterations;
    for (const auto& ex : examples) cfg.batch.push_back(encoder_.relation(state_, class_constant_, ex));
    return train_epoch(state_, cfg, pinning_, stats);
  }

  double error_rate(const ModelSnapshot& snap, const std::vector<LabeledExample>& examples) const {
    if (examples.empty()) return 0.0;
    std::size_t wrong = 0;
    for (const auto& ex : examples)
      wrong += contains(snap, class_constant_.index, encoder_.encode(ex.image)) != ex.label;
    return static_cast<double>(wrong) / static_cast<double>(examples.size());
  }

  AlgebraState& state() { return state_; }
  const ImageEncoder& encoder() const { return encoder_; }
  std::uint32_t class_constant() const { return class_constant_.index; }
  PinningStructure& pinning() { return pinning_; }
  int epoch() const { return epoch_; }

  int reduce_every = 1;
  std::size_t pinning_cap = 0;
  std::size_t max_trace_iterations = 10000;

 private:
  AlgebraState state_;
  ImageEncoder encoder_;
  ElementRef class_constant_;
  PinningStructure pinning_;
  int epoch_ = 0;
};

using ExampleStream = std::function<std::vector<LabeledExample>(std::size_t)>;

enum class BatchRule {
  Fixed,              // constant batch size
  GrowOnStagnation,   // balanced batches, +5% when accuracy on the new batch stops improving
  TestErrorDirection  // +2% when test error rises, -2% when it falls
};

struct EpochReport {
  int epoch = 0;
  std::size_t batch_size = 0;
  double batch_error_before = 0;  // error of the previous model on the new batch
  double test_error = std::numeric_limits<double>::quiet_NaN();
  const ModelSnapshot* snapshot = nullptr;
  const std::vector<LabeledExample>* batch = nullptr;
};

struct FitProtocol {
  BatchRule rule = BatchRule::Fixed;
  std::size_t batch_size = 200;  // per class for GrowOnStagnation
  std::size_t max_batch = 2000;
  double grow = 0.05;
  double step = 0.02;
  int max_epochs = 10;
  int stop_after_zero_error = 0;  // 0 disables
  std::size_t keep = 10;
  std::function<double(const ModelSnapshot&)> test_error;
  std::function<void(const EpochReport&)> on_epoch;
};

namespace detail {

inline std::vector<LabeledExample> balanced_batch(const ExampleStream& stream, std::size_t per_class) {
  std::vector<LabeledExample> pos, neg;
  while (pos.size() < per_class || neg.size() < per_class) {
    auto more = stream(2 * per_class);
    if (more.empty()) break;
    for (auto& ex : more) {
      auto& bucket = ex.label ? pos : neg;
      if (bucket.size() < per_class) bucket.push_back(std::move(ex));
    }
  }
  pos.insert(pos.end(), neg.begin(), neg.end());
  return pos;
}

}  // namespace detail

inline std::vector<ModelSnapshot> fit(SupervisedLearner& learner, const ExampleStream& stream, const FitProtocol& p) {
  std::deque<ModelSnapshot> kept;
  std::optional<ModelSnapshot> last;
  double size = static_cast<double>(p.batch_size);
  double prev_metric = std::numeric_limits<double>::quiet_NaN();
  int zero_streak = 0;
  for (int e = 0; e < p.max_epochs; ++e) {
    auto n = static_cast<std::size_t>(std::llround(size));
    auto batch = p.rule == BatchRule::GrowOnStagnation ? detail::balanced_batch(stream, n) : stream(n);
    double before = last ? learner.error_rate(*last, batch) : 1.0;

    auto snap = learner.train(batch);
    EpochReport rep{learner.epoch(), batch.size(), before, std::numeric_limits<double>::quiet_NaN(), &snap, &batch};
    if (p.test_error) rep.test_error = p.test_error(snap);
    if (p.on_epoch) p.on_epoch(rep);

    if (p.rule == BatchRule::GrowOnStagnation) {
      if (!std::isnan(prev_metric) && before >= prev_metric) size = std::min(size * (1.0 + p.grow), double(p.max_batch));
      prev_metric = before;
    } else if (p.rule == BatchRule::TestErrorDirection && !std::isnan(rep.test_error)) {
      if (!std::isnan(prev_metric)) {
        if (rep.test_error > prev_metric) size = std::min(size * (1.0 + p.step), double(p.max_batch));
        else if (rep.test_error < prev_metric) size = std::max(size * (1.0 - p.step), 2.0);
      }
      prev_metric = rep.test_error;
    }

    kept.push_back(snap);
    if (kept.size() > p.keep) kept.pop_front();
    last = std::move(snap);

    zero_streak = before == 0.0 ? zero_streak + 1 : 0;
    if (p.stop_after_zero_error > 0 && zero_streak >= p.stop_after_zero_error) break;
  }
  return {kept.begin(), kept.end()};
}

}  // namespace aml
