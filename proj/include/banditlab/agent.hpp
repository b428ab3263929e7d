#pragma once

#include <cstdint>
#include <vector>

#include "banditlab/env.hpp"

namespace banditlab {

enum class InitMode {
  optimal,     // q[a] = mu_a / (1 - gamma), the converged table
  iid_sample,  // q[a] ~ N(mu_a, sigma_a^2), one draw per arm in arm order
  constant,    // q[a] = init_constant for all arms
};

// Target of the value update.
//   bellman:         r + gamma * max_a q[a] (bootstrapped discounted return)
//   reward_tracking: r alone, so q[a] tracks the arm's mean reward
// The bootstrapped form makes the optimal init a greedy-path fixed point and
// inflates unpulled arms toward gamma * max, which keeps any value trap
// shallow and self-releasing. The trap demonstrations (an agent that retreats
// from its optimal init and locks onto the zero arm) require reward_tracking,
// so the figure presets use it; bellman stays the constructor default.
enum class UpdateRule { bellman, reward_tracking };

struct AgentConfig {
  double alpha = 0.05;          // learning rate, (0, 1]
  double gamma = 0.95;          // discount, [0, 1); optimal init needs < 1
  double epsilon0 = 1.0;        // initial exploration rate, [0, 1]
  double epsilon_decay = 0.001; // per-step multiplicative decay, >= 0
  double epsilon_min = 0.0;     // exploration floor, [0, epsilon0]
  InitMode init_mode = InitMode::optimal;
  double init_constant = 0.0;
  UpdateRule update_rule = UpdateRule::bellman;

  void validate() const;
};

struct AgentState {
  AgentConfig config;
  std::vector<double> q;
  double epsilon = 0.0;
  std::int64_t step_count = 0;
};

// Builds the initial table for env's arms. iid_sample consumes one normal
// draw per arm with sigma > 0 (sigma == 0 arms take mu exactly, no draw).
AgentState init_agent(const AgentConfig& config, const EnvSpec& env,
                      RngStream& rng);

// Epsilon-greedy: with probability epsilon a uniform arm, otherwise argmax q
// with uniform tie-break over the maximizers. The epsilon draw is skipped
// when epsilon == 0 and the tie-break draw when the argmax is unique, so a
// fully greedy agent on an untied table consumes no rng at all.
int select_action(const AgentState& agent, RngStream& rng);

// delta_t = q[arm] - (reward + gamma * max_a q[a]). Pure.
double td_error(const AgentState& agent, int arm, double reward);

// q[arm] <- (1-alpha) * q[arm] + alpha * target, where target is
// reward + gamma * max_a q[a] (bellman; max over the table before the
// write) or reward alone (reward_tracking). Only q[arm] changes.
void q_update(AgentState& agent, int arm, double reward);

// epsilon <- max(epsilon_min, epsilon * (1 - epsilon_decay)); applied once
// per environment step by the run loop.
void decay_epsilon(AgentState& agent);

}  // namespace banditlab
