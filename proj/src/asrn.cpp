#include "banditlab/asrn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace banditlab {

void AsrnConfig::validate() const {
  if (ensemble_size < 1) {
    throw std::invalid_argument("AsrnConfig: ensemble_size must be >= 1");
  }
  if (window_k < 1) {
    throw std::invalid_argument("AsrnConfig: window_k must be >= 1");
  }
  if (!std::isfinite(predictor_lr) || predictor_lr <= 0.0 ||
      predictor_lr > 1.0) {
    throw std::invalid_argument("AsrnConfig: predictor_lr must be in (0, 1]");
  }
  if (!std::isfinite(predictor_init_sigma) || predictor_init_sigma < 0.0) {
    throw std::invalid_argument(
        "AsrnConfig: predictor_init_sigma must be >= 0");
  }
  if (activation_step < 0) {
    throw std::invalid_argument("AsrnConfig: activation_step must be >= 0");
  }
}

InterestWindow::InterestWindow(int capacity)
    : capacity_(static_cast<std::size_t>(capacity)) {
  if (capacity < 1) {
    throw std::invalid_argument("InterestWindow: capacity must be >= 1");
  }
  ring_.reserve(capacity_);
  sorted_.reserve(capacity_);
}

void InterestWindow::push(double grade) {
  if (ring_.size() == capacity_) {
    const double evicted = ring_[oldest_];
    ring_[oldest_] = grade;
    oldest_ = (oldest_ + 1) % capacity_;
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), evicted);
    sorted_.erase(it);
    sum_sq_ -= evicted * evicted;
  } else {
    ring_.push_back(grade);
  }
  sorted_.insert(std::lower_bound(sorted_.begin(), sorted_.end(), grade),
                 grade);
  sum_sq_ += grade * grade;
}

double InterestWindow::median() const {
  if (sorted_.empty()) return std::numeric_limits<double>::infinity();
  const std::size_t mid = sorted_.size() / 2;
  if (sorted_.size() % 2 == 1) return sorted_[mid];
  return 0.5 * (sorted_[mid - 1] + sorted_[mid]);
}

double InterestWindow::rms() const {
  if (ring_.empty()) return 0.0;
  // sum_sq_ drifts by at most a few ulps per eviction; grades are bounded,
  // so clamp the tiny negative residue that rounding can leave behind.
  const double mean_sq = std::max(0.0, sum_sq_ / ring_.size());
  return std::sqrt(mean_sq);
}

AsrnState init_asrn(const AsrnConfig& config, int n_arms, RngStream& rng) {
  config.validate();
  if (n_arms < 1) {
    throw std::invalid_argument("init_asrn: n_arms must be >= 1");
  }

  AsrnState asrn;
  asrn.config = config;
  asrn.window = InterestWindow(config.window_k);
  asrn.step_count = 0;

  PredictorEnsemble& ens = asrn.ensemble;
  ens.n_arms = n_arms;
  ens.rates.resize(config.ensemble_size);
  const int p_count = config.ensemble_size;
  for (int p = 0; p < p_count; ++p) {
    // Grid over [0.5, 1.5] x predictor_lr, clamped into (0, 1].
    const double factor =
        p_count == 1 ? 1.0 : 0.5 + static_cast<double>(p) / (p_count - 1);
    ens.rates[p] = std::min(1.0, config.predictor_lr * factor);
  }
  ens.estimates.resize(static_cast<std::size_t>(p_count) * n_arms);
  for (double& estimate : ens.estimates) {
    estimate = rng.normal(0.0, config.predictor_init_sigma);
  }
  return asrn;
}

static void check_arm(const AsrnState& asrn, int arm) {
  if (arm < 0 || arm >= asrn.ensemble.n_arms) {
    throw std::out_of_range("asrn: arm index out of range");
  }
}

double interest_grade(const AsrnState& asrn, int arm, double raw_reward) {
  check_arm(asrn, arm);
  const PredictorEnsemble& ens = asrn.ensemble;
  double total = 0.0;
  for (int p = 0; p < ens.size(); ++p) {
    total += std::abs(ens.at(p, arm) - raw_reward);
  }
  return total / ens.size();
}

void update_predictors(AsrnState& asrn, int arm, double raw_reward) {
  check_arm(asrn, arm);
  const double grade = interest_grade(asrn, arm, raw_reward);
  PredictorEnsemble& ens = asrn.ensemble;
  for (int p = 0; p < ens.size(); ++p) {
    double& estimate = ens.at(p, arm);
    estimate += ens.rates[p] * (raw_reward - estimate);
  }
  asrn.window.push(grade);
}

double median_interest(const AsrnState& asrn) { return asrn.window.median(); }

static double noise_scale(const AsrnState& asrn, double interest,
                          double med) {
  switch (asrn.config.mode) {
    case NoiseScaleMode::median:
      return med;
    case NoiseScaleMode::variance_matching:
      return std::sqrt(std::max(0.0, med * med - interest * interest));
    case NoiseScaleMode::literal:
      return interest;
    case NoiseScaleMode::rms:
      return asrn.window.rms();
  }
  throw std::logic_error("noise_scale: unknown mode");
}

FilterResult filter_reward(AsrnState& asrn, int arm, double raw_reward,
                           RngStream& rng) {
  const std::int64_t t = asrn.step_count++;
  if (t < asrn.config.activation_step) {
    // Dormant: the ensemble keeps tracking the reward stream (so the window
    // reflects the agent's actual policy mix at activation), but the reward
    // passes through untouched and no rng draw happens.
    update_predictors(asrn, arm, raw_reward);
    return {raw_reward, std::nullopt, std::nullopt};
  }

  const double interest = interest_grade(asrn, arm, raw_reward);
  const double med = median_interest(asrn);
  const bool warmed =
      asrn.window.size() >=
      static_cast<std::size_t>(noise_warmup_grades(asrn.config));

  double emitted = raw_reward;
  if (warmed && interest < med) {
    const double s = noise_scale(asrn, interest, med);
    if (s > 0.0) emitted = raw_reward + s * rng.standard_normal();
  }

  FilterResult result;
  result.emitted = emitted;
  result.interest = interest;
  if (std::isfinite(med)) result.i_med = med;
  update_predictors(asrn, arm, raw_reward);
  return result;
}

}  // namespace banditlab
