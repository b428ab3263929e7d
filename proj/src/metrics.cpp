#include "banditlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace banditlab {

int preference(std::span<const double> q) {
  if (q.size() < 2) {
    throw std::invalid_argument("preference: need at least 2 arms");
  }
  if (q[1] > q[0]) return 1;
  if (q[0] > q[1]) return -1;
  return 0;
}

void ChoiceTally::add(std::span<const double> q, double delta) {
  switch (preference(q)) {
    case 1:
      ++n_right;
      loss_right_sum += delta * delta;
      break;
    case -1:
      ++n_left;
      loss_left_sum += delta * delta;
      break;
    default:
      ++n_tie;
      break;
  }
}

void ChoiceTally::add_action(std::int32_t action, double delta) {
  if (action != 0) {
    ++n_right;
    loss_right_sum += delta * delta;
  } else {
    ++n_left;
    loss_left_sum += delta * delta;
  }
}

double ChoiceTally::right_fraction() const {
  if (total() == 0) {
    throw std::invalid_argument("right_fraction: empty population");
  }
  return (n_right + 0.5 * n_tie) / total();
}

std::optional<double> ChoiceTally::mean_loss_right() const {
  if (n_right == 0) return std::nullopt;
  return loss_right_sum / n_right;
}

std::optional<double> ChoiceTally::mean_loss_left() const {
  if (n_left == 0) return std::nullopt;
  return loss_left_sum / n_left;
}

MetricsFrame ChoiceTally::frame(std::int64_t step) const {
  MetricsFrame f;
  f.step = step;
  f.right_fraction = right_fraction();
  f.mean_loss_right = mean_loss_right();
  f.mean_loss_left = mean_loss_left();
  f.n_right = n_right;
  f.n_left = n_left;
  f.n_tie = n_tie;
  return f;
}

double right_fraction(const std::vector<std::vector<double>>& q_snapshots) {
  ChoiceTally tally;
  for (const std::vector<double>& q : q_snapshots) tally.add(q, 0.0);
  return tally.right_fraction();
}

LossByChoice mean_loss_by_choice(const std::vector<StepRecord>& records) {
  ChoiceTally tally;
  for (const StepRecord& rec : records) tally.add(rec.q, rec.delta);
  return {tally.mean_loss_right(), tally.mean_loss_left()};
}

std::vector<TrapEvent> detect_trap_events(std::span<const StepRecord> trace) {
  std::vector<TrapEvent> events;
  bool trapped = false;
  for (const StepRecord& rec : trace) {
    const int pref = preference(rec.q);
    if (!trapped && pref == -1) {
      trapped = true;
      events.push_back({rec.agent_id, rec.step, std::nullopt});
    } else if (trapped && pref == 1) {
      trapped = false;
      events.back().exit_step = rec.step;
    }
  }
  return events;
}

TrapDurationStats trap_duration_stats(std::span<const TrapEvent> events,
                                      std::int64_t horizon) {
  TrapDurationStats stats;
  stats.n_events = events.size();
  if (events.empty()) return stats;

  std::vector<double> durations;
  durations.reserve(events.size());
  std::size_t unexited = 0;
  for (const TrapEvent& event : events) {
    if (event.exit_step) {
      durations.push_back(
          static_cast<double>(*event.exit_step - event.entry_step));
    } else {
      ++unexited;
      durations.push_back(static_cast<double>(horizon));
    }
  }
  std::sort(durations.begin(), durations.end());
  const std::size_t mid = durations.size() / 2;
  stats.median_duration = durations.size() % 2 == 1
                              ? durations[mid]
                              : 0.5 * (durations[mid - 1] + durations[mid]);
  stats.never_exit_fraction =
      static_cast<double>(unexited) / static_cast<double>(events.size());
  return stats;
}

double var_delta_oracle(const EnvSpec& env, int arm, double gamma,
                        std::int64_t n_samples, RngStream& rng) {
  env.validate();
  if (arm < 0 || arm >= env.n_arms()) {
    throw std::out_of_range("var_delta_oracle: arm index out of range");
  }
  if (n_samples < 1) {
    throw std::invalid_argument("var_delta_oracle: n_samples must be >= 1");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("var_delta_oracle: gamma must be in [0, 1)");
  }

  const double q = env.arms[arm].reward.mu / (1.0 - gamma);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double r = sample_reward(env, arm, rng);
    const double delta = q - (r + gamma * q);
    sum += delta * delta;
  }
  return sum / static_cast<double>(n_samples);
}

}  // namespace banditlab
