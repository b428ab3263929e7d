#include "banditlab/config.hpp"

#include <charconv>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "banditlab/csvio.hpp"

namespace banditlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("parse_config: line " + std::to_string(line) +
                              ": " + what);
}

template <typename Int>
Int to_int(int line, const std::string& key, const std::string& value) {
  Int out{};
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    fail(line, key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

double to_double(int line, const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const std::exception&) {
    fail(line, key + ": expected a number, got '" + value + "'");
  }
}

bool to_bool(int line, const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(line, key + ": expected true or false, got '" + value + "'");
}

std::vector<NormalParams> parse_arm_list(int line, const std::string& value) {
  std::vector<NormalParams> arms;
  std::stringstream ss(value);
  std::string entry;
  while (std::getline(ss, entry, ',')) {
    entry = trim(entry);
    const std::size_t colon = entry.find(':');
    if (colon == std::string::npos) {
      fail(line, "arms: expected mu:sigma, got '" + entry + "'");
    }
    NormalParams p;
    p.mu = to_double(line, "arms", trim(entry.substr(0, colon)));
    p.sigma = to_double(line, "arms", trim(entry.substr(colon + 1)));
    arms.push_back(p);
  }
  if (arms.empty()) fail(line, "arms: empty list");
  return arms;
}

const char* init_mode_name(InitMode mode) {
  switch (mode) {
    case InitMode::optimal: return "optimal";
    case InitMode::iid_sample: return "iid_sample";
    case InitMode::constant: return "constant";
  }
  return "optimal";
}

const char* update_rule_name(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::bellman: return "bellman";
    case UpdateRule::reward_tracking: return "reward_tracking";
  }
  return "bellman";
}

const char* noise_mode_name(NoiseScaleMode mode) {
  switch (mode) {
    case NoiseScaleMode::median: return "median";
    case NoiseScaleMode::variance_matching: return "variance_matching";
    case NoiseScaleMode::literal: return "literal";
    case NoiseScaleMode::rms: return "rms";
  }
  return "median";
}

}  // namespace

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  out += "# experiment configuration; rerun with: banditlab run --config "
         "<this file>\n";
  out += "[run]\n";
  out += "run_id = " + config.run_id + "\n";
  out += "n_agents = " + std::to_string(config.n_agents) + "\n";
  out += "n_steps = " + std::to_string(config.n_steps) + "\n";
  out += "master_seed = " + std::to_string(config.master_seed) + "\n";
  out += "record_every = " + std::to_string(config.record_every) + "\n";
  out += "threads = " + std::to_string(config.threads) + "\n";
  out += "out_dir = " + config.out_dir + "\n";
  out += std::string("grouping = ") +
         (config.group_by_action ? "action" : "preference") + "\n";
  out += "\n[env]\n";
  out += "arms = ";
  for (std::size_t i = 0; i < config.env.arms.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(config.env.arms[i].reward.mu) + ":" +
           format_double(config.env.arms[i].reward.sigma);
  }
  out += "\n";
  out += "\n[agent]\n";
  out += "alpha = " + format_double(config.agent.alpha) + "\n";
  out += "gamma = " + format_double(config.agent.gamma) + "\n";
  out += "epsilon0 = " + format_double(config.agent.epsilon0) + "\n";
  out += "epsilon_decay = " + format_double(config.agent.epsilon_decay) + "\n";
  out += "epsilon_min = " + format_double(config.agent.epsilon_min) + "\n";
  out += std::string("init_mode = ") + init_mode_name(config.agent.init_mode) +
         "\n";
  out += "init_constant = " + format_double(config.agent.init_constant) + "\n";
  out += std::string("update_rule = ") +
         update_rule_name(config.agent.update_rule) + "\n";
  out += "\n[asrn]\n";
  if (!config.asrn) {
    out += "enabled = false\n";
    return out;
  }
  out += "enabled = true\n";
  out += "ensemble_size = " + std::to_string(config.asrn->ensemble_size) + "\n";
  out += "window_k = " + std::to_string(config.asrn->window_k) + "\n";
  out += "predictor_lr = " + format_double(config.asrn->predictor_lr) + "\n";
  out += "predictor_init_sigma = " +
         format_double(config.asrn->predictor_init_sigma) + "\n";
  out +=
      "activation_step = " + std::to_string(config.asrn->activation_step) +
      "\n";
  out += std::string("noise_scale_mode = ") +
         noise_mode_name(config.asrn->mode) + "\n";
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::string section;

  std::optional<std::string> env_preset;
  std::optional<std::vector<NormalParams>> env_arms;
  int env_line = 0;

  std::optional<bool> asrn_enabled;
  AsrnConfig asrn_scratch;
  bool asrn_param_seen = false;
  int asrn_param_line = 0;

  std::stringstream stream(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    const std::size_t hash = raw_line.find('#');
    if (hash != std::string::npos) raw_line.erase(hash);
    const std::string line = trim(raw_line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section != "run" && section != "env" && section != "agent" &&
          section != "asrn") {
        fail(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (section.empty()) {
      fail(line_no, "key '" + key + "' before any section header");
    }

    if (section == "run") {
      if (key == "run_id") config.run_id = value;
      else if (key == "n_agents")
        config.n_agents = to_int<std::int64_t>(line_no, key, value);
      else if (key == "n_steps")
        config.n_steps = to_int<std::int64_t>(line_no, key, value);
      else if (key == "master_seed")
        config.master_seed = to_int<std::uint64_t>(line_no, key, value);
      else if (key == "record_every")
        config.record_every = to_int<std::int64_t>(line_no, key, value);
      else if (key == "threads")
        config.threads = to_int<int>(line_no, key, value);
      else if (key == "out_dir")
        config.out_dir = value;
      else if (key == "grouping") {
        if (value == "preference") config.group_by_action = false;
        else if (value == "action") config.group_by_action = true;
        else fail(line_no, "grouping must be preference or action");
      } else {
        fail(line_no, "unknown key '" + key + "' in [run]");
      }
    } else if (section == "env") {
      if (key == "preset") {
        env_preset = value;
        env_line = line_no;
      } else if (key == "arms") {
        env_arms = parse_arm_list(line_no, value);
        env_line = line_no;
      } else {
        fail(line_no, "unknown key '" + key + "' in [env]");
      }
    } else if (section == "agent") {
      if (key == "alpha") config.agent.alpha = to_double(line_no, key, value);
      else if (key == "gamma")
        config.agent.gamma = to_double(line_no, key, value);
      else if (key == "epsilon0")
        config.agent.epsilon0 = to_double(line_no, key, value);
      else if (key == "epsilon_decay")
        config.agent.epsilon_decay = to_double(line_no, key, value);
      else if (key == "epsilon_min")
        config.agent.epsilon_min = to_double(line_no, key, value);
      else if (key == "init_mode") {
        if (value == "optimal") config.agent.init_mode = InitMode::optimal;
        else if (value == "iid_sample")
          config.agent.init_mode = InitMode::iid_sample;
        else if (value == "constant")
          config.agent.init_mode = InitMode::constant;
        else
          fail(line_no, "init_mode must be optimal, iid_sample, or constant");
      } else if (key == "init_constant") {
        config.agent.init_constant = to_double(line_no, key, value);
      } else if (key == "update_rule") {
        if (value == "bellman") config.agent.update_rule = UpdateRule::bellman;
        else if (value == "reward_tracking")
          config.agent.update_rule = UpdateRule::reward_tracking;
        else
          fail(line_no, "update_rule must be bellman or reward_tracking");
      } else {
        fail(line_no, "unknown key '" + key + "' in [agent]");
      }
    } else {  // asrn
      if (key == "enabled") {
        asrn_enabled = to_bool(line_no, key, value);
        continue;
      }
      asrn_param_seen = true;
      asrn_param_line = line_no;
      if (key == "ensemble_size")
        asrn_scratch.ensemble_size = to_int<int>(line_no, key, value);
      else if (key == "window_k")
        asrn_scratch.window_k = to_int<int>(line_no, key, value);
      else if (key == "predictor_lr")
        asrn_scratch.predictor_lr = to_double(line_no, key, value);
      else if (key == "predictor_init_sigma")
        asrn_scratch.predictor_init_sigma = to_double(line_no, key, value);
      else if (key == "activation_step")
        asrn_scratch.activation_step =
            to_int<std::int64_t>(line_no, key, value);
      else if (key == "noise_scale_mode") {
        if (value == "median") asrn_scratch.mode = NoiseScaleMode::median;
        else if (value == "variance_matching")
          asrn_scratch.mode = NoiseScaleMode::variance_matching;
        else if (value == "literal")
          asrn_scratch.mode = NoiseScaleMode::literal;
        else if (value == "rms")
          asrn_scratch.mode = NoiseScaleMode::rms;
        else
          fail(line_no,
               "noise_scale_mode must be median, variance_matching, literal, "
               "or rms");
      } else {
        fail(line_no, "unknown key '" + key + "' in [asrn]");
      }
    }
  }

  if (env_preset && env_arms) {
    fail(env_line, "[env] takes preset or arms, not both");
  }
  if (env_preset) {
    if (*env_preset == "broken_armed") config.env = broken_armed_bandit();
    else if (*env_preset == "fig3") config.env = fig3_bandit();
    else fail(env_line, "unknown env preset '" + *env_preset + "'");
  } else if (env_arms) {
    config.env = custom_env(*env_arms);
  }

  if (asrn_param_seen && !asrn_enabled) {
    fail(asrn_param_line, "[asrn] has keys but no enabled = true|false line");
  }
  if (asrn_param_seen && !*asrn_enabled) {
    fail(asrn_param_line, "[asrn] keys given but enabled = false");
  }
  if (asrn_enabled && *asrn_enabled) config.asrn = asrn_scratch;

  config.validate();
  return config;
}

}  // namespace banditlab
