#include "banditlab/cli.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "banditlab/config.hpp"
#include "banditlab/csvio.hpp"
#include "banditlab/experiment.hpp"
#include "banditlab/metrics.hpp"

namespace banditlab::cli {

namespace {

struct RunFlags {
  std::string preset_name;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> agents;
  std::optional<std::int64_t> steps;
  std::string asrn_toggle;  // "", "on", "off"
  std::optional<std::int64_t> record_every;
  std::optional<int> threads;
  std::string out_dir;
};

struct OracleVarDeltaFlags {
  std::string preset_name = "broken_armed";
  std::string arm = "right";
  double gamma = 0.95;
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 1;
};

struct OracleTrapFlags {
  std::vector<double> sigma_grid = {0.25, 0.5, 1.0, 2.0};
  std::int64_t seeds = 200;
  std::int64_t steps = 2000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir;
};

struct PlotFlags {
  std::string in_dir;
  std::string out_dir;
};

EnvSpec env_preset(const std::string& name) {
  if (name == "broken_armed") return broken_armed_bandit();
  if (name == "fig3") return fig3_bandit();
  throw std::invalid_argument("unknown env preset '" + name +
                              "'; known: broken_armed, fig3");
}

int do_run(const RunFlags& flags, std::ostream& out) {
  if (flags.preset_name.empty() == flags.config_path.empty()) {
    throw std::invalid_argument("run needs exactly one of --preset/--config");
  }

  if (flags.preset_name == "sigma_sweep") {
    if (!flags.asrn_toggle.empty() || flags.record_every) {
      throw std::invalid_argument(
          "--asrn/--record-every do not apply to the sigma_sweep grid");
    }
    const std::vector<double> grid = {0.25, 0.5, 1.0, 2.0};
    const std::string dir =
        flags.out_dir.empty() ? "out/sigma_sweep" : flags.out_dir;
    const auto points = run_sigma_sweep(
        grid, flags.agents.value_or(200), flags.steps.value_or(2000),
        flags.seed.value_or(1), flags.threads.value_or(0), dir);
    out << "sigma_l,n_events,median_duration,never_exit_fraction\n";
    for (const SigmaSweepPoint& p : points) {
      out << format_double(p.sigma_l) << ',' << p.stats.n_events << ',';
      if (p.stats.median_duration) {
        out << format_double(*p.stats.median_duration);
      }
      out << ',' << format_double(p.stats.never_exit_fraction) << '\n';
    }
    out << "wrote " << dir << "\n";
    return 0;
  }

  ExperimentConfig config = !flags.preset_name.empty()
                                ? preset(flags.preset_name)
                                : parse_config(read_text_file(flags.config_path));
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.agents) config.n_agents = *flags.agents;
  if (flags.steps) config.n_steps = *flags.steps;
  if (flags.record_every) config.record_every = *flags.record_every;
  if (flags.threads) config.threads = *flags.threads;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.asrn_toggle == "off") {
    config.asrn.reset();
  } else if (flags.asrn_toggle == "on" && !config.asrn) {
    config.asrn = AsrnConfig{};  // immediate activation
  }
  config.validate();

  const ExperimentResult result = run_experiment(config);
  write_outputs(result, config.out_dir);
  if (!result.frames.empty()) {
    const MetricsFrame& last = result.frames.back();
    out << "final step " << last.step
        << ": right_fraction = " << format_double(last.right_fraction)
        << " (n_right=" << last.n_right << ", n_left=" << last.n_left
        << ", n_tie=" << last.n_tie << ")\n";
  }
  out << "trap events: " << result.events.size() << "\n";
  out << "wrote " << config.out_dir << "\n";
  return 0;
}

int do_oracle_var_delta(const OracleVarDeltaFlags& flags, std::ostream& out) {
  const EnvSpec env = env_preset(flags.preset_name);
  int arm = env.arm_index(flags.arm);
  if (arm < 0) {
    const char* first = flags.arm.data();
    const char* last = first + flags.arm.size();
    auto [ptr, ec] = std::from_chars(first, last, arm);
    if (ec != std::errc{} || ptr != last) arm = -1;
  }
  if (arm < 0 || arm >= env.n_arms()) {
    throw std::invalid_argument("unknown arm '" + flags.arm +
                                "'; use left, right, or an index");
  }
  RngStream rng(flags.seed);
  const double estimate =
      var_delta_oracle(env, arm, flags.gamma, flags.n_samples, rng);
  out << "mean delta^2 at the converged table, arm " << arm << " ("
      << flags.n_samples << " samples): " << format_double(estimate) << "\n";
  return 0;
}

int do_oracle_trap(const OracleTrapFlags& flags, std::ostream& out) {
  const std::optional<std::string> dir =
      flags.out_dir.empty() ? std::nullopt
                            : std::optional<std::string>(flags.out_dir);
  const auto points = run_sigma_sweep(flags.sigma_grid, flags.seeds,
                                      flags.steps, flags.seed, flags.threads,
                                      dir);
  out << "sigma_l,n_events,median_duration,never_exit_fraction\n";
  for (const SigmaSweepPoint& p : points) {
    out << format_double(p.sigma_l) << ',' << p.stats.n_events << ',';
    if (p.stats.median_duration) out << format_double(*p.stats.median_duration);
    out << ',' << format_double(p.stats.never_exit_fraction) << '\n';
  }
  return 0;
}

std::optional<double> parse_optional_field(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return parse_double(field);
}

int do_plot(const PlotFlags& flags, std::ostream& out) {
  const std::string in_dir = flags.in_dir;
  const std::string out_dir = flags.out_dir.empty() ? in_dir : flags.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("plot: cannot create directory " + out_dir +
                             ": " + ec.message());
  }

  const CsvTable agg = read_csv(in_dir + "/aggregate.csv");
  const std::size_t c_step = agg.column("step");
  const std::size_t c_rf = agg.column("right_fraction");
  const std::size_t c_mlr = agg.column("mean_loss_right");
  const std::size_t c_mll = agg.column("mean_loss_left");
  const std::size_t c_nr = agg.column("n_right");
  const std::size_t c_nl = agg.column("n_left");
  const std::size_t c_run = agg.column("run_id");
  std::vector<MetricsFrame> frames;
  frames.reserve(agg.rows.size());
  std::string label = "run";
  for (const auto& row : agg.rows) {
    MetricsFrame frame;
    frame.step = static_cast<std::int64_t>(parse_double(row[c_step]));
    frame.right_fraction = parse_double(row[c_rf]);
    frame.mean_loss_right = parse_optional_field(row[c_mlr]);
    frame.mean_loss_left = parse_optional_field(row[c_mll]);
    frame.n_right = static_cast<std::int32_t>(parse_double(row[c_nr]));
    frame.n_left = static_cast<std::int32_t>(parse_double(row[c_nl]));
    frames.push_back(frame);
    label = row[c_run];
  }

  const CsvTable steps = read_csv(in_dir + "/steps.csv");
  const std::size_t s_agent = steps.column("agent_id");
  const std::size_t s_step = steps.column("step");
  std::vector<std::size_t> q_cols;
  for (int a = 0;; ++a) {
    bool found = false;
    const std::string name = "q_" + std::to_string(a);
    for (std::size_t i = 0; i < steps.header.size(); ++i) {
      if (steps.header[i] == name) {
        q_cols.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) break;
  }
  std::vector<StepRecord> agent_records;
  std::string first_agent;
  for (const auto& row : steps.rows) {
    if (first_agent.empty()) first_agent = row[s_agent];
    if (row[s_agent] != first_agent) continue;
    StepRecord rec;
    rec.step = static_cast<std::int64_t>(parse_double(row[s_step]));
    for (std::size_t col : q_cols) rec.q.push_back(parse_double(row[col]));
    agent_records.push_back(std::move(rec));
  }

  write_text_file(out_dir + "/right_fraction.svg",
                  chart_right_fraction(label, frames));
  write_text_file(out_dir + "/loss_by_choice.svg",
                  chart_loss_by_choice(frames));
  write_text_file(out_dir + "/qtable_agent0.svg", chart_qtable(agent_records));
  out << "wrote 3 charts to " << out_dir << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"deterministic bandit laboratory: unequal-variance Q-learning "
               "runs with optional adaptive reward noising"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* cmd_run =
      app.add_subcommand("run", "execute a preset or a config file");
  cmd_run->add_option("--preset", run_flags.preset_name,
                      "preset name: fig1_no_asrn, fig1_asrn, fig3, "
                      "sigma_sweep");
  cmd_run->add_option("--config", run_flags.config_path,
                      "path to a sectioned key-value config file");
  cmd_run->add_option("--seed", run_flags.seed, "master seed override");
  cmd_run->add_option("--agents", run_flags.agents,
                      "population size override (sweep: seeds per point)");
  cmd_run->add_option("--steps", run_flags.steps, "horizon override");
  cmd_run->add_option("--asrn", run_flags.asrn_toggle,
                      "on: attach the default reward-noising filter "
                      "(immediate activation) if absent; off: remove it")
      ->check(CLI::IsMember({"on", "off"}));
  cmd_run->add_option("--record-every", run_flags.record_every,
                      "trace thinning stride");
  cmd_run->add_option("--threads", run_flags.threads,
                      "worker threads (0 = hardware)");
  cmd_run->add_option("--out", run_flags.out_dir, "output directory");

  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "closed-form and Monte Carlo reference "
                                   "computations");
  cmd_oracle->require_subcommand(1);

  OracleVarDeltaFlags vd_flags;
  CLI::App* cmd_vd = cmd_oracle->add_subcommand(
      "var-delta", "mean squared TD error at the converged table");
  cmd_vd->add_option("--preset", vd_flags.preset_name,
                     "env preset: broken_armed, fig3");
  cmd_vd->add_option("--arm", vd_flags.arm, "left, right, or an arm index");
  cmd_vd->add_option("--gamma", vd_flags.gamma, "discount factor");
  cmd_vd->add_option("-n,--samples", vd_flags.n_samples, "sample count");
  cmd_vd->add_option("--seed", vd_flags.seed, "rng seed");

  OracleTrapFlags trap_flags;
  CLI::App* cmd_trap = cmd_oracle->add_subcommand(
      "trap-duration", "censored trap-duration sweep over the left arm's "
                       "sigma");
  cmd_trap->add_option("--sigma-grid", trap_flags.sigma_grid,
                       "left-arm sigma values");
  cmd_trap->add_option("--seeds", trap_flags.seeds, "agents per grid point");
  cmd_trap->add_option("--steps", trap_flags.steps, "horizon per agent");
  cmd_trap->add_option("--seed", trap_flags.seed, "master seed");
  cmd_trap->add_option("--threads", trap_flags.threads,
                       "worker threads (0 = hardware)");
  cmd_trap->add_option("--out", trap_flags.out_dir,
                       "also write per-point run outputs here");

  PlotFlags plot_flags;
  CLI::App* cmd_plot =
      app.add_subcommand("plot", "re-render the SVG charts from CSV outputs");
  cmd_plot->add_option("--in", plot_flags.in_dir, "directory with steps.csv "
                                                  "and aggregate.csv")
      ->required();
  cmd_plot->add_option("--out", plot_flags.out_dir,
                       "chart output directory (default: --in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (cmd_run->parsed()) return do_run(run_flags, out);
    if (cmd_vd->parsed()) return do_oracle_var_delta(vd_flags, out);
    if (cmd_trap->parsed()) return do_oracle_trap(trap_flags, out);
    if (cmd_plot->parsed()) return do_plot(plot_flags, out);
    err << "error: no subcommand\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace banditlab::cli
