#include "banditlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

#include "banditlab/config.hpp"
#include "banditlab/csvio.hpp"
#include "banditlab/plot.hpp"

namespace banditlab {

void ExperimentConfig::validate() const {
  env.validate();
  agent.validate();
  if (asrn) asrn->validate();
  if (n_agents < 1) {
    throw std::invalid_argument("ExperimentConfig: n_agents must be >= 1");
  }
  // n_steps == 0 is the documented snapshot-only run.
  if (n_steps < 0) {
    throw std::invalid_argument("ExperimentConfig: n_steps must be >= 0");
  }
  if (record_every < 1) {
    throw std::invalid_argument("ExperimentConfig: record_every must be >= 1");
  }
  if (threads < 0) {
    throw std::invalid_argument("ExperimentConfig: threads must be >= 0");
  }
  if (run_id.empty() ||
      run_id.find_first_of(",\n#") != std::string::npos) {
    throw std::invalid_argument(
        "ExperimentConfig: run_id must be non-empty without ',', '#', "
        "or newlines");
  }
  if (out_dir.find_first_of("\n#") != std::string::npos) {
    throw std::invalid_argument(
        "ExperimentConfig: out_dir must not contain '#' or newlines");
  }
}

Trace run_agent(const ExperimentConfig& config, std::int64_t agent_index) {
  const std::uint64_t agent_key =
      RngStream::derive(config.master_seed,
                        static_cast<std::uint64_t>(agent_index))
          .seed();
  RngStream agent_rng = RngStream::derive(agent_key, 0);
  RngStream filter_rng = RngStream::derive(agent_key, 1);

  AgentState agent = init_agent(config.agent, config.env, agent_rng);

  std::unique_ptr<RewardFilter> filter;
  if (config.asrn) {
    filter = std::make_unique<AsrnFilter>(
        init_asrn(*config.asrn, config.env.n_arms(), filter_rng));
  } else {
    filter = std::make_unique<IdentityFilter>();
  }

  Trace trace;
  trace.agent_id = static_cast<std::int32_t>(agent_index);
  trace.initial_q = agent.q;
  trace.initial_epsilon = agent.epsilon;
  if (config.n_steps > 0) {
    trace.records.reserve(static_cast<std::size_t>(
        (config.n_steps + config.record_every - 1) / config.record_every));
  }

  for (std::int64_t t = 0; t < config.n_steps; ++t) {
    const double epsilon_at_selection = agent.epsilon;
    const int action = select_action(agent, agent_rng);
    const double raw = sample_reward(config.env, action, agent_rng);
    const FilterResult filtered = filter->apply(action, raw, filter_rng);
    const double delta = td_error(agent, action, filtered.emitted);
    q_update(agent, action, filtered.emitted);
    decay_epsilon(agent);
    if (t % config.record_every == 0) {
      StepRecord rec;
      rec.step = t;
      rec.agent_id = trace.agent_id;
      rec.action = action;
      rec.raw_reward = raw;
      rec.emitted_reward = filtered.emitted;
      rec.epsilon = epsilon_at_selection;
      rec.delta = delta;
      rec.interest = filtered.interest;
      rec.i_med = filtered.i_med;
      rec.q = agent.q;
      trace.records.push_back(std::move(rec));
    }
  }
  return trace;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();

  ExperimentResult result;
  result.config = config;
  result.traces.resize(static_cast<std::size_t>(config.n_agents));

  std::int64_t workers =
      config.threads > 0
          ? config.threads
          : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<std::int64_t>(workers, config.n_agents);

  if (workers <= 1) {
    for (std::int64_t i = 0; i < config.n_agents; ++i) {
      result.traces[static_cast<std::size_t>(i)] = run_agent(config, i);
    }
  } else {
    // Stride partition: worker w owns agents w, w+workers, ... Each trace
    // lands in its own preallocated slot, so output never depends on
    // scheduling order.
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (std::int64_t i = w; i < config.n_agents; i += workers) {
            result.traces[static_cast<std::size_t>(i)] = run_agent(config, i);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  result.frames = aggregate_frames(result.traces, config.group_by_action);
  for (const Trace& trace : result.traces) {
    std::vector<TrapEvent> events = detect_trap_events(trace.records);
    result.events.insert(result.events.end(), events.begin(), events.end());
  }
  return result;
}

std::vector<MetricsFrame> aggregate_frames(const std::vector<Trace>& traces,
                                           bool group_by_action) {
  std::vector<MetricsFrame> frames;
  if (traces.empty()) return frames;
  const std::size_t n_records = traces.front().records.size();
  for (const Trace& trace : traces) {
    if (trace.records.size() != n_records) {
      throw std::invalid_argument("aggregate_frames: ragged traces");
    }
  }
  frames.reserve(n_records);
  for (std::size_t k = 0; k < n_records; ++k) {
    ChoiceTally tally;
    for (const Trace& trace : traces) {
      const StepRecord& rec = trace.records[k];
      if (group_by_action) {
        tally.add_action(rec.action, rec.delta);
      } else {
        tally.add(rec.q, rec.delta);
      }
    }
    frames.push_back(tally.frame(traces.front().records[k].step));
  }
  return frames;
}

namespace {

void append_optional(std::string& out, const std::optional<double>& value) {
  out += ',';
  if (value) out += format_double(*value);
}

std::string steps_csv(const ExperimentResult& result) {
  const int n_arms = result.config.env.n_arms();
  std::string out =
      "run_id,agent_id,step,action,raw_reward,emitted_reward,epsilon,delta,"
      "interest,i_med";
  for (int a = 0; a < n_arms; ++a) out += ",q_" + std::to_string(a);
  out += '\n';
  for (const Trace& trace : result.traces) {
    for (const StepRecord& rec : trace.records) {
      out += result.config.run_id;
      out += ',';
      out += std::to_string(rec.agent_id);
      out += ',';
      out += std::to_string(rec.step);
      out += ',';
      out += std::to_string(rec.action);
      out += ',';
      out += format_double(rec.raw_reward);
      out += ',';
      out += format_double(rec.emitted_reward);
      out += ',';
      out += format_double(rec.epsilon);
      out += ',';
      out += format_double(rec.delta);
      append_optional(out, rec.interest);
      append_optional(out, rec.i_med);
      for (double q : rec.q) {
        out += ',';
        out += format_double(q);
      }
      out += '\n';
    }
  }
  return out;
}

std::string aggregate_csv(const ExperimentResult& result) {
  std::string out =
      "run_id,step,right_fraction,mean_loss_right,mean_loss_left,n_right,"
      "n_left\n";
  for (const MetricsFrame& frame : result.frames) {
    out += result.config.run_id;
    out += ',';
    out += std::to_string(frame.step);
    out += ',';
    out += format_double(frame.right_fraction);
    append_optional(out, frame.mean_loss_right);
    append_optional(out, frame.mean_loss_left);
    out += ',';
    out += std::to_string(frame.n_right);
    out += ',';
    out += std::to_string(frame.n_left);
    out += '\n';
  }
  return out;
}

std::string events_csv(const ExperimentResult& result) {
  std::string out = "run_id,agent_id,entry_step,exit_step\n";
  for (const TrapEvent& event : result.events) {
    out += result.config.run_id;
    out += ',';
    out += std::to_string(event.agent_id);
    out += ',';
    out += std::to_string(event.entry_step);
    out += ',';
    if (event.exit_step) out += std::to_string(*event.exit_step);
    out += '\n';
  }
  return out;
}

}  // namespace

std::string chart_right_fraction(const std::string& label,
                                 const std::vector<MetricsFrame>& frames) {
  Series s;
  s.label = label;
  s.color = "#2078b4";
  s.x.reserve(frames.size());
  s.y.reserve(frames.size());
  for (const MetricsFrame& frame : frames) {
    s.x.push_back(static_cast<double>(frame.step));
    s.y.push_back(frame.right_fraction);
  }
  return render_line_chart("fraction preferring the right arm", "step",
                           "right fraction", {s});
}

std::string chart_loss_by_choice(const std::vector<MetricsFrame>& frames) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Series right{"right-preferring", "#2078b4", {}, {}};
  Series left{"left-preferring", "#ff7f0e", {}, {}};
  std::vector<double> right_raw, left_raw;
  for (const MetricsFrame& frame : frames) {
    const double x = static_cast<double>(frame.step);
    right.x.push_back(x);
    left.x.push_back(x);
    right_raw.push_back(frame.mean_loss_right ? *frame.mean_loss_right : nan);
    left_raw.push_back(frame.mean_loss_left ? *frame.mean_loss_left : nan);
  }
  right.y = moving_average(right_raw, 50);
  left.y = moving_average(left_raw, 50);
  return render_line_chart("mean squared TD error by preference (window 50)",
                           "step", "mean delta^2", {right, left});
}

std::string chart_qtable(const std::vector<StepRecord>& agent_records) {
  std::vector<Series> series;
  const int n_arms =
      agent_records.empty() ? 0
                            : static_cast<int>(agent_records.front().q.size());
  const char* palette[] = {"#2078b4", "#ff7f0e", "#2ca02c", "#d62728"};
  for (int a = 0; a < n_arms; ++a) {
    Series s;
    s.label = "q_" + std::to_string(a);
    s.color = palette[a % 4];
    s.x.reserve(agent_records.size());
    s.y.reserve(agent_records.size());
    for (const StepRecord& rec : agent_records) {
      s.x.push_back(static_cast<double>(rec.step));
      s.y.push_back(rec.q[static_cast<std::size_t>(a)]);
    }
    series.push_back(std::move(s));
  }
  return render_line_chart("agent 0 value estimates", "step", "Q", series);
}

void write_outputs(const ExperimentResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("write_outputs: cannot create directory " + dir +
                             ": " + ec.message());
  }
  write_text_file(dir + "/steps.csv", steps_csv(result));
  write_text_file(dir + "/aggregate.csv", aggregate_csv(result));
  write_text_file(dir + "/events.csv", events_csv(result));
  write_text_file(dir + "/config.txt", format_config(result.config));
  write_text_file(dir + "/right_fraction.svg",
                  chart_right_fraction(result.config.run_id, result.frames));
  write_text_file(dir + "/loss_by_choice.svg",
                  chart_loss_by_choice(result.frames));
  write_text_file(dir + "/qtable_agent0.svg",
                  chart_qtable(result.traces.empty()
                                   ? std::vector<StepRecord>{}
                                   : result.traces.front().records));
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig config;
  config.run_id = name;
  // The figure presets track raw rewards (the rule behind the published
  // trap demonstrations); the bootstrapped rule keeps the optimal init a
  // fixed point and never degrades. See AgentConfig::update_rule.
  config.agent.update_rule = UpdateRule::reward_tracking;
  // Pilot-tuned exploration start: by the step-1000 filter activation the
  // exploration rate must be mostly decayed (0.2 * 0.999^1000 ~ 0.07) or
  // trapped agents' forced right pulls dominate their loss, yet enough
  // exploration must survive to keep trap entry/exit dynamics alive.
  config.agent.epsilon0 = 0.2;
  if (name == "fig1_no_asrn") {
    config.env = broken_armed_bandit();
    config.n_agents = 100;
    config.n_steps = 20000;
    config.out_dir = "out/fig1_no_asrn";
  } else if (name == "fig1_asrn") {
    config.env = broken_armed_bandit();
    config.n_agents = 100;
    config.n_steps = 20000;
    config.asrn = AsrnConfig{};
    config.asrn->activation_step = 1000;
    // Pilot-tuned filter shape: the window RMS is the only scale that stays
    // near the interesting arm's full reward sd once the window mixes both
    // arms' grades, and the long window keeps pre-trap grades alive so newly
    // trapped agents still receive full-strength noise.
    config.asrn->mode = NoiseScaleMode::rms;
    config.asrn->window_k = 5000;
    config.out_dir = "out/fig1_asrn";
  } else if (name == "fig3") {
    config.env = fig3_bandit();
    config.agent.alpha = 0.1;
    config.agent.gamma = 0.9;
    config.n_agents = 1;
    config.n_steps = 2000;
    config.out_dir = "out/fig3";
  } else {
    throw std::invalid_argument(
        "unknown preset '" + name +
        "'; single-run presets: fig1_no_asrn, fig1_asrn, fig3 "
        "(sigma_sweep is a run grid; see run_sigma_sweep)");
  }
  return config;
}

std::vector<std::string> preset_names() {
  return {"fig1_no_asrn", "fig1_asrn", "fig3", "sigma_sweep"};
}

std::vector<SigmaSweepPoint> run_sigma_sweep(
    const std::vector<double>& sigma_grid, std::int64_t n_seeds,
    std::int64_t n_steps, std::uint64_t master_seed, int threads,
    const std::optional<std::string>& out_dir) {
  if (sigma_grid.empty()) {
    throw std::invalid_argument("run_sigma_sweep: empty sigma grid");
  }
  std::vector<SigmaSweepPoint> points;
  points.reserve(sigma_grid.size());
  std::string sweep_summary =
      "sigma_l,n_events,median_duration,never_exit_fraction\n";
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    ExperimentConfig config;
    config.run_id = "sigma_" + format_double(sigma_grid[i]);
    config.env = custom_env({{0.0, sigma_grid[i]}, {1.0, 7.0}});
    config.agent.alpha = 0.1;
    config.agent.gamma = 0.9;
    config.agent.update_rule = UpdateRule::reward_tracking;
    config.agent.epsilon0 = 0.2;
    config.n_agents = n_seeds;
    config.n_steps = n_steps;
    config.master_seed = RngStream::derive(master_seed, i).seed();
    config.threads = threads;
    if (out_dir) config.out_dir = *out_dir + "/" + config.run_id;

    const ExperimentResult result = run_experiment(config);
    SigmaSweepPoint point;
    point.sigma_l = sigma_grid[i];
    point.stats = trap_duration_stats(result.events, n_steps);
    points.push_back(point);

    sweep_summary += format_double(point.sigma_l);
    sweep_summary += ',';
    sweep_summary += std::to_string(point.stats.n_events);
    append_optional(sweep_summary, point.stats.median_duration);
    sweep_summary += ',';
    sweep_summary += format_double(point.stats.never_exit_fraction);
    sweep_summary += '\n';

    if (out_dir) write_outputs(result, config.out_dir);
  }
  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    write_text_file(*out_dir + "/sweep.csv", sweep_summary);
  }
  return points;
}

}  // namespace banditlab
