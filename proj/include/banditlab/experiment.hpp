#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banditlab/agent.hpp"
#include "banditlab/asrn.hpp"
#include "banditlab/env.hpp"
#include "banditlab/metrics.hpp"

namespace banditlab {

// Full description of one population run. Everything that influences a
// single output byte lives here; master_seed plus this struct determines
// every CSV byte regardless of thread count.
struct ExperimentConfig {
  std::string run_id = "custom";
  EnvSpec env = broken_armed_bandit();
  AgentConfig agent;
  std::optional<AsrnConfig> asrn;  // absent = identity reward filter
  std::int64_t n_agents = 1;
  std::int64_t n_steps = 0;
  std::uint64_t master_seed = 1;
  std::int64_t record_every = 1;
  int threads = 0;  // 0 = one worker per hardware thread
  std::string out_dir = "out";
  // Population grouping for aggregate.csv: greedy Q-preference (default)
  // or the epsilon-contaminated action actually taken.
  bool group_by_action = false;

  void validate() const;
};

// One agent's recorded history. records holds every step with
// step % record_every == 0, in step order.
struct Trace {
  std::int32_t agent_id = 0;
  std::vector<double> initial_q;
  double initial_epsilon = 0.0;
  std::vector<StepRecord> records;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<Trace> traces;        // sorted by agent_id
  std::vector<MetricsFrame> frames; // one per recorded step
  std::vector<TrapEvent> events;    // sorted by (agent_id, entry_step)
};

// Runs one agent for n_steps. Each step is:
//   select_action -> sample_reward -> filter -> td_error(emitted)
//   -> q_update(emitted) -> decay_epsilon -> record.
// The agent draws from stream derive(agent_key, 0) and the reward filter
// from derive(agent_key, 1), agent_key = derive(master_seed, agent_index),
// so toggling the filter never perturbs the agent's own draws.
Trace run_agent(const ExperimentConfig& config, std::int64_t agent_index);

// Runs every agent (possibly across several worker threads; agents never
// share state), then aggregates frames and trap events. Output is
// independent of scheduling: each agent's trace lands in its own slot.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Recomputes the per-step population aggregates from completed traces.
std::vector<MetricsFrame> aggregate_frames(const std::vector<Trace>& traces,
                                           bool group_by_action = false);

// Writes steps.csv, aggregate.csv, events.csv, config.txt and the SVG
// charts into dir (created if missing). CSVs are the normative output;
// doubles are serialized shortest-round-trip so a reader recovers the exact
// bit pattern. Throws on I/O failure, naming the path.
void write_outputs(const ExperimentResult& result, const std::string& dir);

// Chart builders shared by write_outputs and the CSV re-rendering path, so
// both produce byte-identical SVGs from equal data.
std::string chart_right_fraction(const std::string& label,
                                 const std::vector<MetricsFrame>& frames);
std::string chart_loss_by_choice(const std::vector<MetricsFrame>& frames);
std::string chart_qtable(const std::vector<StepRecord>& agent_records);

// Named single-run presets: fig1_no_asrn, fig1_asrn, fig3.
// (sigma_sweep is a grid of runs; see run_sigma_sweep.)
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct SigmaSweepPoint {
  double sigma_l = 0.0;
  TrapDurationStats stats;
};

// Trap-duration sweep over the left arm's sigma with the heavy-noise
// two-arm setup (mu_l=0, mu_r=1, sigma_r=7, alpha=0.1, gamma=0.9):
// n_seeds independent agents per grid point, horizon n_steps. Each grid
// point runs under seed derive(master_seed, point_index). When out_dir is
// given, per-point outputs land in <out_dir>/sigma_<value>/ plus a
// sweep.csv summary.
std::vector<SigmaSweepPoint> run_sigma_sweep(
    const std::vector<double>& sigma_grid, std::int64_t n_seeds,
    std::int64_t n_steps, std::uint64_t master_seed, int threads,
    const std::optional<std::string>& out_dir);

}  // namespace banditlab
