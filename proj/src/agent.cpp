#include "banditlab/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace banditlab {

void AgentConfig::validate() const {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0) {
    throw std::invalid_argument("AgentConfig: alpha must be in (0, 1]");
  }
  if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0) {
    throw std::invalid_argument("AgentConfig: gamma must be in [0, 1)");
  }
  if (!std::isfinite(epsilon0) || epsilon0 < 0.0 || epsilon0 > 1.0) {
    throw std::invalid_argument("AgentConfig: epsilon0 must be in [0, 1]");
  }
  if (!std::isfinite(epsilon_decay) || epsilon_decay < 0.0) {
    throw std::invalid_argument("AgentConfig: epsilon_decay must be >= 0");
  }
  if (!std::isfinite(epsilon_min) || epsilon_min < 0.0 ||
      epsilon_min > epsilon0) {
    throw std::invalid_argument(
        "AgentConfig: epsilon_min must be in [0, epsilon0]");
  }
  if (init_mode == InitMode::constant && !std::isfinite(init_constant)) {
    throw std::invalid_argument("AgentConfig: init_constant must be finite");
  }
}

AgentState init_agent(const AgentConfig& config, const EnvSpec& env,
                      RngStream& rng) {
  config.validate();
  env.validate();

  AgentState agent;
  agent.config = config;
  agent.epsilon = config.epsilon0;
  agent.step_count = 0;
  agent.q.resize(env.arms.size());

  switch (config.init_mode) {
    case InitMode::optimal:
      for (std::size_t a = 0; a < env.arms.size(); ++a) {
        agent.q[a] = env.arms[a].reward.mu / (1.0 - config.gamma);
      }
      break;
    case InitMode::iid_sample:
      for (std::size_t a = 0; a < env.arms.size(); ++a) {
        agent.q[a] = sample_normal(rng, env.arms[a].reward);
      }
      break;
    case InitMode::constant:
      std::fill(agent.q.begin(), agent.q.end(), config.init_constant);
      break;
  }
  return agent;
}

int select_action(const AgentState& agent, RngStream& rng) {
  const int n = static_cast<int>(agent.q.size());
  if (agent.epsilon > 0.0 && rng.uniform01() < agent.epsilon) {
    return static_cast<int>(rng.uniform_below(static_cast<std::uint32_t>(n)));
  }

  const double best = *std::max_element(agent.q.begin(), agent.q.end());
  int n_best = 0;
  for (int a = 0; a < n; ++a) {
    if (agent.q[a] == best) ++n_best;
  }
  if (n_best == 1) {
    for (int a = 0; a < n; ++a) {
      if (agent.q[a] == best) return a;
    }
  }
  std::uint32_t pick = rng.uniform_below(static_cast<std::uint32_t>(n_best));
  for (int a = 0; a < n; ++a) {
    if (agent.q[a] == best && pick-- == 0) return a;
  }
  throw std::logic_error("select_action: unreachable");
}

static void check_arm(const AgentState& agent, int arm) {
  if (arm < 0 || arm >= static_cast<int>(agent.q.size())) {
    throw std::out_of_range("q table: arm index out of range");
  }
}

double td_error(const AgentState& agent, int arm, double reward) {
  check_arm(agent, arm);
  const double best = *std::max_element(agent.q.begin(), agent.q.end());
  return agent.q[arm] - (reward + agent.config.gamma * best);
}

void q_update(AgentState& agent, int arm, double reward) {
  check_arm(agent, arm);
  double target = reward;
  if (agent.config.update_rule == UpdateRule::bellman) {
    const double best = *std::max_element(agent.q.begin(), agent.q.end());
    target += agent.config.gamma * best;
  }
  agent.q[arm] = (1.0 - agent.config.alpha) * agent.q[arm] +
                 agent.config.alpha * target;
  ++agent.step_count;
}

void decay_epsilon(AgentState& agent) {
  agent.epsilon = std::max(agent.config.epsilon_min,
                           agent.epsilon * (1.0 - agent.config.epsilon_decay));
}

}  // namespace banditlab
