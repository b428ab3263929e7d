#include "banditlab/env.hpp"

#include <stdexcept>

namespace banditlab {

void EnvSpec::validate() const {
  if (arms.size() < 2) {
    throw std::invalid_argument("EnvSpec: need at least 2 arms");
  }
  if (!names.empty() && names.size() != arms.size()) {
    throw std::invalid_argument("EnvSpec: names must match arm count");
  }
  for (const ArmSpec& arm : arms) arm.reward.validate();
}

int EnvSpec::arm_index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

EnvSpec broken_armed_bandit() {
  EnvSpec env;
  env.arms = {{{0.0, 0.0}}, {{1.0, 2.5}}};
  env.names = {"left", "right"};
  return env;
}

EnvSpec fig3_bandit() {
  EnvSpec env;
  env.arms = {{{0.0, 0.5}}, {{1.0, 7.0}}};
  env.names = {"left", "right"};
  return env;
}

EnvSpec custom_env(std::vector<NormalParams> arm_params) {
  EnvSpec env;
  env.arms.reserve(arm_params.size());
  for (const NormalParams& p : arm_params) env.arms.push_back({p});
  if (env.arms.size() == 2) env.names = {"left", "right"};
  env.validate();
  return env;
}

double sample_reward(const EnvSpec& env, int arm, RngStream& rng) {
  if (arm < 0 || arm >= env.n_arms()) {
    throw std::out_of_range("sample_reward: arm index out of range");
  }
  return sample_normal(rng, env.arms[arm].reward);
}

FilterResult IdentityFilter::apply(int, double raw_reward, RngStream&) {
  return {raw_reward, std::nullopt, std::nullopt};
}

}  // namespace banditlab
