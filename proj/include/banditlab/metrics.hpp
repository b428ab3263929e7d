#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "banditlab/env.hpp"

namespace banditlab {

// One recorded environment step of one agent. q is the post-update snapshot.
// epsilon is the selection-time value (pre-decay), so the stored curve is
// epsilon0 * (1 - decay)^step. interest/i_med are absent whenever the reward
// filter did not grade the step (identity filter, or ASRN before activation).
struct StepRecord {
  std::int64_t step = 0;
  std::int32_t agent_id = 0;
  std::int32_t action = 0;
  double raw_reward = 0.0;
  double emitted_reward = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::optional<double> interest;
  std::optional<double> i_med;
  std::vector<double> q;
};

// One excursion into the trapped regime (Q_l strictly above Q_r).
// exit_step is absent when the agent never left before the horizon.
struct TrapEvent {
  std::int32_t agent_id = 0;
  std::int64_t entry_step = 0;
  std::optional<std::int64_t> exit_step;
};

// Population aggregate at one recorded step. n_right/n_left/n_tie partition
// the population by greedy preference; ties are excluded from the loss means
// and counted half-right for the fraction.
struct MetricsFrame {
  std::int64_t step = 0;
  double right_fraction = 0.0;
  std::optional<double> mean_loss_right;
  std::optional<double> mean_loss_left;
  std::int32_t n_right = 0;
  std::int32_t n_left = 0;
  std::int32_t n_tie = 0;
};

// Greedy preference of a 2-arm table: +1 when q[1] > q[0] (right), -1 when
// q[0] > q[1] (left), 0 on an exact tie. Tables with more than two arms
// compare their first two entries; left/right semantics are a 2-arm concept.
int preference(std::span<const double> q);

// Streaming tally of one step's population, by greedy preference.
struct ChoiceTally {
  std::int32_t n_right = 0;
  std::int32_t n_left = 0;
  std::int32_t n_tie = 0;
  double loss_right_sum = 0.0;
  double loss_left_sum = 0.0;

  void add(std::span<const double> q, double delta);
  // Variant grouping: by the action actually taken (never produces a tie).
  void add_action(std::int32_t action, double delta);
  int total() const { return n_right + n_left + n_tie; }
  double right_fraction() const;
  std::optional<double> mean_loss_right() const;
  std::optional<double> mean_loss_left() const;
  MetricsFrame frame(std::int64_t step) const;
};

// Fraction of agents preferring the right arm: ties count one half.
// Throws on an empty population.
double right_fraction(const std::vector<std::vector<double>>& q_snapshots);

// Mean squared TD error per preference group; a group with no members yields
// an absent value. Ties belong to neither group. (Smoothing for plots is a
// presentation concern; see plot.hpp.)
struct LossByChoice {
  std::optional<double> right;
  std::optional<double> left;
};
LossByChoice mean_loss_by_choice(const std::vector<StepRecord>& records);

// Scans one agent's records in step order and emits alternating trap
// entry/exit events based on the post-update snapshots. Equal Q values
// preserve the current regime; the agent starts untrapped, so a first
// record with Q_l > Q_r is an entry at that record's step.
std::vector<TrapEvent> detect_trap_events(std::span<const StepRecord> trace);

struct TrapDurationStats {
  std::optional<double> median_duration;
  double never_exit_fraction = 0.0;
  std::size_t n_events = 0;
};

// Durations are exit - entry; events without an exit are censored and enter
// the median as the horizon value itself. No events: absent median, zero
// fraction.
TrapDurationStats trap_duration_stats(std::span<const TrapEvent> events,
                                      std::int64_t horizon);

// Brute-force estimate of E[delta^2] for one arm at the converged table:
// Q is frozen at mu_arm / (1 - gamma) with the bootstrap taken on the same
// arm (the converged greedy policy keeps pulling it), so delta reduces to
// mu_arm - r. Independent of the agent module by construction; used as the
// oracle against td_error.
double var_delta_oracle(const EnvSpec& env, int arm, double gamma,
                        std::int64_t n_samples, RngStream& rng);

}  // namespace banditlab
