#pragma once

#include <optional>
#include <string>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

struct ArmSpec {
  NormalParams reward;
};

// Stationary multi-armed bandit: independent normal reward per arm.
// Arm order is part of the contract; by convention 2-arm environments are
// {left, right} = {arms[0], arms[1]} and the metrics layer reads them so.
struct EnvSpec {
  std::vector<ArmSpec> arms;
  std::vector<std::string> names;  // optional labels, same length as arms

  int n_arms() const { return static_cast<int>(arms.size()); }
  void validate() const;
  int arm_index(const std::string& name) const;  // -1 if unknown
};

// Deterministic left arm (0, 0), noisy right arm (1, 2.5).
EnvSpec broken_armed_bandit();

// Low-noise left arm (0, 0.5), heavy-noise right arm (1, 7).
EnvSpec fig3_bandit();

EnvSpec custom_env(std::vector<NormalParams> arm_params);

// One reward draw from the given arm; throws std::out_of_range on a bad index.
double sample_reward(const EnvSpec& env, int arm, RngStream& rng);

// What a reward filter did on one step. interest/i_med are only present when
// an adaptive filter actually graded the step (absent for identity filters
// and for dormant pass-through).
struct FilterResult {
  double emitted = 0.0;
  std::optional<double> interest;
  std::optional<double> i_med;
};

// Hook between the environment and the agent: sees every (arm, raw reward)
// pair in step order and decides what the agent is shown. Implementations
// may hold state; the caller supplies the rng stream the filter may consume.
class RewardFilter {
 public:
  virtual ~RewardFilter() = default;
  virtual FilterResult apply(int arm, double raw_reward, RngStream& rng) = 0;
};

// Passes rewards through untouched and consumes no rng draws.
class IdentityFilter final : public RewardFilter {
 public:
  FilterResult apply(int arm, double raw_reward, RngStream& rng) override;
};

}  // namespace banditlab
