#pragma once

#include <cstdint>
#include <vector>

#include "banditlab/env.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

// How the injected noise scale s is chosen on a below-median step.
//   median:            s = I_med
//   variance_matching: s = sqrt(max(0, I_med^2 - I_t^2))
//   literal:           s = I_t (the current, low grade; kept for comparison,
//                      too small to equalize anything by construction)
//   rms:               s = root-mean-square of the window grades
enum class NoiseScaleMode { median, variance_matching, literal, rms };

struct AsrnConfig {
  int ensemble_size = 5;
  int window_k = 1000;
  double predictor_lr = 0.1;         // (0, 1]
  double predictor_init_sigma = 1.0; // >= 0
  std::int64_t activation_step = 0;  // filter is dormant before this step
  NoiseScaleMode mode = NoiseScaleMode::median;

  void validate() const;
};

// Noising only engages once this many grades have accumulated; the median of
// a tiny window is too unstable to trust.
inline int noise_warmup_grades(const AsrnConfig& config) {
  return config.window_k < 100 ? config.window_k : 100;
}

// Per-predictor, per-arm exponentially weighted reward estimates. Learning
// rates are spread over a grid around the configured rate so the ensemble
// members disagree in how fast they track the reward stream.
struct PredictorEnsemble {
  int n_arms = 0;
  std::vector<double> rates;      // one per predictor, each in (0, 1]
  std::vector<double> estimates;  // row-major: estimates[p * n_arms + arm]

  int size() const { return static_cast<int>(rates.size()); }
  double& at(int predictor, int arm) {
    return estimates[static_cast<std::size_t>(predictor) * n_arms + arm];
  }
  double at(int predictor, int arm) const {
    return estimates[static_cast<std::size_t>(predictor) * n_arms + arm];
  }
};

// Ring buffer of the most recent K interest grades plus a sorted mirror of
// the same values, so the median is a constant-time lookup and each push
// costs one binary search + one O(K) shift.
class InterestWindow {
 public:
  explicit InterestWindow(int capacity);

  void push(double grade);
  std::size_t size() const { return ring_.size(); }
  bool empty() const { return ring_.empty(); }

  // Median of the stored grades; even counts average the two middle values.
  // Empty window yields +infinity, the "never noise" sentinel.
  double median() const;

  // sqrt(mean of squared grades); 0 on an empty window.
  double rms() const;

 private:
  std::size_t capacity_;
  std::size_t oldest_ = 0;      // ring slot evicted next, once full
  std::vector<double> ring_;    // chronological, wraps at capacity
  std::vector<double> sorted_;  // same multiset, ascending
  double sum_sq_ = 0.0;
};

struct AsrnState {
  AsrnConfig config;
  PredictorEnsemble ensemble;
  InterestWindow window;
  std::int64_t step_count = 0;

  AsrnState() : window(1) {}
};

// Random predictor initialization: estimates ~ N(0, predictor_init_sigma^2),
// drawn predictor-major then arm-major from the given stream.
AsrnState init_asrn(const AsrnConfig& config, int n_arms, RngStream& rng);

// I_t = mean over predictors of |estimate[arm] - raw_reward|, evaluated on
// the current (pre-update) estimates.
double interest_grade(const AsrnState& asrn, int arm, double raw_reward);

// One exponential-averaging step per predictor on the pulled arm, against the
// RAW reward; the step's interest grade is appended to the window (evicting
// the oldest entry beyond capacity).
void update_predictors(AsrnState& asrn, int arm, double raw_reward);

// Median of the current window; +infinity when the window is empty.
double median_interest(const AsrnState& asrn);

// One full filter step. The predictors learn from the raw reward and the
// window accumulates grades from the very first call; emission is dormant
// (bit-exact pass-through, no rng use, interest fields absent) until
// step_count reaches activation_step. Once active: grade the step, add
// zero-mean noise of the configured scale when the grade is strictly below
// the window median (and the warm-up quota is met), then let the predictors
// learn from the raw reward. Noise draws are the only rng use.
FilterResult filter_reward(AsrnState& asrn, int arm, double raw_reward,
                           RngStream& rng);

// RewardFilter adapter around AsrnState for the experiment loop.
class AsrnFilter final : public RewardFilter {
 public:
  explicit AsrnFilter(AsrnState state) : state_(std::move(state)) {}

  FilterResult apply(int arm, double raw_reward, RngStream& rng) override {
    return filter_reward(state_, arm, raw_reward, rng);
  }

  const AsrnState& state() const { return state_; }
  AsrnState& state() { return state_; }

 private:
  AsrnState state_;
};

}  // namespace banditlab
