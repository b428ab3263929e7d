#include <cmath>
#include <stdexcept>
#include <vector>

#include "banditlab/asrn.hpp"
#include "banditlab/rng.hpp"
#include "doctest.h"

using namespace banditlab;

namespace {

AsrnConfig zero_init_config() {
  AsrnConfig config;
  config.predictor_init_sigma = 0.0;  // estimates start at exactly 0
  return config;
}

// Sample moments of emitted rewards over repeated single filtered steps with
// the filter state rebuilt (and therefore pinned) before each call.
struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  double skew = 0.0;
};

template <typename MakeState>
Moments pinned_step_moments(MakeState make_state, int arm, double raw,
                            int n, RngStream& rng) {
  std::vector<double> values;
  values.reserve(n);
  for (int i = 0; i < n; ++i) {
    AsrnState state = make_state();
    values.push_back(filter_reward(state, arm, raw, rng).emitted);
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  return {mean, std::sqrt(m2), m3 / std::pow(m2, 1.5)};
}

}  // namespace

TEST_CASE("config validation enforces the documented ranges") {
  CHECK_NOTHROW(AsrnConfig{}.validate());
  AsrnConfig bad;
  bad.ensemble_size = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = AsrnConfig{};
  bad.window_k = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = AsrnConfig{};
  bad.predictor_lr = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = AsrnConfig{};
  bad.predictor_lr = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = AsrnConfig{};
  bad.predictor_init_sigma = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = AsrnConfig{};
  bad.activation_step = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  RngStream rng(1);
  CHECK_THROWS_AS(init_asrn(AsrnConfig{}, 0, rng), std::invalid_argument);
}

TEST_CASE("initialization draws the documented ensemble") {
  AsrnConfig config = zero_init_config();
  RngStream rng(5);
  const AsrnState state = init_asrn(config, 2, rng);
  CHECK_EQ(state.ensemble.estimates.size(), 10u);  // 5 predictors x 2 arms
  for (double estimate : state.ensemble.estimates) CHECK_EQ(estimate, 0.0);
  CHECK(state.window.empty());
  CHECK_EQ(state.step_count, 0);

  // Learning-rate grid spans [0.5, 1.5] x base rate.
  const std::vector<double>& rates = state.ensemble.rates;
  REQUIRE_EQ(rates.size(), 5u);
  CHECK_EQ(rates[0], doctest::Approx(0.05).epsilon(1e-12));
  CHECK_EQ(rates[1], doctest::Approx(0.075).epsilon(1e-12));
  CHECK_EQ(rates[2], doctest::Approx(0.1).epsilon(1e-12));
  CHECK_EQ(rates[3], doctest::Approx(0.125).epsilon(1e-12));
  CHECK_EQ(rates[4], doctest::Approx(0.15).epsilon(1e-12));

  // A single predictor uses the base rate itself; large rates clamp at 1.
  AsrnConfig single = config;
  single.ensemble_size = 1;
  RngStream rng2(5);
  CHECK_EQ(init_asrn(single, 2, rng2).ensemble.rates[0], 0.1);
  AsrnConfig fast = config;
  fast.predictor_lr = 0.8;
  RngStream rng3(5);
  CHECK_EQ(init_asrn(fast, 2, rng3).ensemble.rates.back(), 1.0);

  // Same seed, same random initialization.
  AsrnConfig noisy;
  RngStream ra(99), rb(99);
  const AsrnState a = init_asrn(noisy, 3, ra);
  const AsrnState b = init_asrn(noisy, 3, rb);
  CHECK_EQ(a.ensemble.estimates, b.ensemble.estimates);
}

TEST_CASE("interest grade is the ensemble's mean absolute error") {
  AsrnConfig config = zero_init_config();
  RngStream rng(1);
  AsrnState state = init_asrn(config, 2, rng);

  // All estimates equal the reward: perfect prediction.
  for (int p = 0; p < state.ensemble.size(); ++p) state.ensemble.at(p, 1) = 3.0;
  CHECK_EQ(interest_grade(state, 1, 3.0), 0.0);

  // Single predictor at 0 grading a reward of 5.
  AsrnConfig single = zero_init_config();
  single.ensemble_size = 1;
  RngStream rng2(1);
  AsrnState lone = init_asrn(single, 2, rng2);
  CHECK_EQ(interest_grade(lone, 0, 5.0), 5.0);

  CHECK_THROWS_AS(interest_grade(lone, 2, 0.0), std::out_of_range);
}

TEST_CASE("converged predictors grade at the reward's mean absolute deviation") {
  AsrnConfig config = zero_init_config();
  RngStream rng(17);
  AsrnState state = init_asrn(config, 2, rng);
  for (int p = 0; p < state.ensemble.size(); ++p) state.ensemble.at(p, 1) = 1.0;

  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += interest_grade(state, 1, rng.normal(1.0, 2.5));
  }
  // E|N(0, 2.5^2)| = 2.5 * sqrt(2/pi) ~ 1.9947
  CHECK_EQ(sum / n, doctest::Approx(1.9947).epsilon(0.025));
}

TEST_CASE("predictor updates take one exponential-averaging step") {
  AsrnConfig single = zero_init_config();
  single.ensemble_size = 1;
  RngStream rng(1);
  AsrnState state = init_asrn(single, 2, rng);

  update_predictors(state, 0, 10.0);
  CHECK_EQ(state.ensemble.at(0, 0), doctest::Approx(1.0).epsilon(1e-12));
  CHECK_EQ(state.ensemble.at(0, 1), 0.0);  // other arm untouched
  CHECK_EQ(state.window.size(), 1u);       // grade appended

  // Constant rewards pull the estimate in geometrically.
  const double c = -4.0;
  for (int i = 0; i < 200; ++i) update_predictors(state, 1, c);
  const double expected = c * (1.0 - std::pow(1.0 - 0.1, 200));
  CHECK_EQ(state.ensemble.at(0, 1), doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("interest window keeps the newest K grades") {
  InterestWindow window(3);
  CHECK(window.empty());
  CHECK_EQ(window.median(), std::numeric_limits<double>::infinity());
  CHECK_EQ(window.rms(), 0.0);

  window.push(1.0);
  window.push(2.0);
  window.push(3.0);
  CHECK_EQ(window.size(), 3u);
  CHECK_EQ(window.median(), 2.0);
  CHECK_EQ(window.rms(), doctest::Approx(std::sqrt(14.0 / 3.0)).epsilon(1e-12));

  window.push(4.0);  // evicts the 1.0
  CHECK_EQ(window.size(), 3u);
  CHECK_EQ(window.median(), 3.0);
  CHECK_EQ(window.rms(), doctest::Approx(std::sqrt(29.0 / 3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(InterestWindow(0), std::invalid_argument);
}

TEST_CASE("median follows the even-count rule") {
  InterestWindow window(10);
  window.push(1.0);
  window.push(2.0);
  window.push(3.0);
  CHECK_EQ(window.median(), 2.0);
  window.push(4.0);
  CHECK_EQ(window.median(), 2.5);
}

TEST_CASE("an all-zero window never noises anything") {
  AsrnConfig config = zero_init_config();
  config.window_k = 3;
  RngStream rng(1);
  AsrnState state = init_asrn(config, 2, rng);
  state.window.push(0.0);
  state.window.push(0.0);
  state.window.push(0.0);
  CHECK_EQ(median_interest(state), 0.0);

  RngStream noise(2);
  // High grade: passes through because it is above the median.
  CHECK_EQ(filter_reward(state, 0, 5.0, noise).emitted, 5.0);
  // Zero grade: strict below-median comparison fails against a median of 0.
  AsrnState state2 = init_asrn(config, 2, rng);
  state2.window.push(0.0);
  state2.window.push(0.0);
  state2.window.push(0.0);
  CHECK_EQ(filter_reward(state2, 0, 0.0, noise).emitted, 0.0);
}

TEST_CASE("high-interest steps pass through bit-exactly") {
  AsrnConfig config = zero_init_config();
  config.window_k = 5;
  RngStream rng(1);
  AsrnState state = init_asrn(config, 2, rng);
  for (int i = 0; i < 5; ++i) state.window.push(1.0);

  RngStream noise(2);
  RngStream untouched = noise;
  const FilterResult result = filter_reward(state, 0, 10.0, noise);
  CHECK_EQ(result.emitted, 10.0);  // I_t = 10 >= median 1
  REQUIRE(result.interest.has_value());
  CHECK_EQ(*result.interest, 10.0);
  REQUIRE(result.i_med.has_value());
  CHECK_EQ(*result.i_med, 1.0);
  CHECK_EQ(noise.next_u64(), untouched.next_u64());
}

TEST_CASE("dormant phase passes rewards through while still learning") {
  AsrnConfig config;  // random init, default window
  config.activation_step = 50;
  RngStream rng(21);
  AsrnState state = init_asrn(config, 2, rng);

  RngStream noise(3);
  RngStream untouched = noise;
  RngStream rewards(4);
  for (int t = 0; t < 50; ++t) {
    const double r = rewards.normal(1.0, 2.5);
    const FilterResult result = filter_reward(state, t % 2, r, noise);
    CHECK_EQ(result.emitted, r);  // bit-exact pass-through
    CHECK_FALSE(result.interest.has_value());
    CHECK_FALSE(result.i_med.has_value());
  }
  // No rng consumed while dormant...
  CHECK_EQ(noise.next_u64(), untouched.next_u64());
  // ...but the ensemble kept grading, so activation starts on a warm window.
  CHECK_EQ(state.window.size(), 50u);
  CHECK_EQ(state.step_count, 50);

  const FilterResult first_active = filter_reward(state, 0, 0.0, noise);
  CHECK(first_active.interest.has_value());
  CHECK(first_active.i_med.has_value());
}

TEST_CASE("noising waits for the warm-up quota") {
  AsrnConfig config = zero_init_config();  // K = 1000, warm-up 100
  RngStream rng(1);
  AsrnState state = init_asrn(config, 2, rng);

  RngStream noise(9);
  int first_noised = -1;
  for (int t = 0; t < 400; ++t) {
    const double r = (t % 2 == 0) ? 10.0 : 0.0;
    const FilterResult result = filter_reward(state, 0, r, noise);
    if (result.emitted != r && first_noised < 0) first_noised = t;
    if (t < 100) CHECK_EQ(result.emitted, r);
  }
  CHECK_GE(first_noised, 100);
  CHECK_NE(first_noised, -1);  // noise does engage once warmed
}

TEST_CASE("noise scale follows the configured mode") {
  // Estimates pinned at 1, reward 0 -> I_t = 1; window pinned at {2,2,2}.
  auto make_state = [](NoiseScaleMode mode) {
    return [mode]() {
      AsrnConfig config = zero_init_config();
      config.window_k = 3;
      config.mode = mode;
      RngStream rng(1);
      AsrnState state = init_asrn(config, 2, rng);
      for (int p = 0; p < state.ensemble.size(); ++p) {
        state.ensemble.at(p, 0) = 1.0;
      }
      state.window.push(2.0);
      state.window.push(2.0);
      state.window.push(2.0);
      return state;
    };
  };

  const int n = 4000;
  RngStream noise(31);

  const Moments median_m = pinned_step_moments(make_state(NoiseScaleMode::median), 0, 0.0, n, noise);
  CHECK_EQ(median_m.sd, doctest::Approx(2.0).epsilon(0.06));

  const Moments vm = pinned_step_moments(make_state(NoiseScaleMode::variance_matching), 0, 0.0, n, noise);
  CHECK_EQ(vm.sd, doctest::Approx(std::sqrt(3.0)).epsilon(0.06));

  const Moments literal_m = pinned_step_moments(make_state(NoiseScaleMode::literal), 0, 0.0, n, noise);
  CHECK_EQ(literal_m.sd, doctest::Approx(1.0).epsilon(0.06));

  const Moments rms_m = pinned_step_moments(make_state(NoiseScaleMode::rms), 0, 0.0, n, noise);
  CHECK_EQ(rms_m.sd, doctest::Approx(2.0).epsilon(0.06));

  // literal mode with a perfectly predicted reward has scale 0: pass-through.
  AsrnConfig config = zero_init_config();
  config.window_k = 3;
  config.mode = NoiseScaleMode::literal;
  RngStream rng(1);
  AsrnState state = init_asrn(config, 2, rng);
  state.window.push(2.0);
  state.window.push(2.0);
  state.window.push(2.0);
  RngStream untouched = noise;
  CHECK_EQ(filter_reward(state, 0, 0.0, noise).emitted, 0.0);
  CHECK_EQ(noise.next_u64(), untouched.next_u64());
}

TEST_CASE("injected noise is zero-mean and symmetric") {
  // Boring arm: estimates 0, reward 0, window pinned well above, median mode.
  auto make_state = []() {
    AsrnConfig config = zero_init_config();
    config.window_k = 3;
    RngStream rng(1);
    AsrnState state = init_asrn(config, 2, rng);
    state.window.push(2.0);
    state.window.push(2.0);
    state.window.push(2.0);
    return state;
  };
  const int n = 20000;
  RngStream noise(77);
  const Moments m = pinned_step_moments(make_state, 0, 0.0, n, noise);
  CHECK_LT(std::abs(m.mean), 4.0 * 2.0 / std::sqrt(double(n)));
  CHECK_EQ(m.sd, doctest::Approx(2.0).epsilon(0.03));
  CHECK_LT(std::abs(m.skew), 0.1);
}

TEST_CASE("interest stays nonnegative and the window stays bounded") {
  AsrnConfig config;
  config.window_k = 64;
  RngStream rng(55);
  AsrnState state = init_asrn(config, 2, rng);
  RngStream noise(56);
  RngStream rewards(57);
  for (int t = 0; t < 500; ++t) {
    const double r = rewards.normal(0.0, 3.0);
    const FilterResult result = filter_reward(state, t % 2, r, noise);
    REQUIRE(result.interest.has_value());
    CHECK_GE(*result.interest, 0.0);
    CHECK_LE(state.window.size(), 64u);
  }
  CHECK_EQ(state.window.size(), 64u);
}
