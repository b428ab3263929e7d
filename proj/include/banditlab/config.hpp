#pragma once

#include <string>

#include "banditlab/experiment.hpp"

namespace banditlab {

// Serializes the full run description in the sectioned key-value format that
// parse_config reads back. The echo written next to run outputs uses this,
// and parse_config(format_config(c)) reproduces c exactly; environments are
// always echoed as explicit per-arm mu:sigma pairs.
std::string format_config(const ExperimentConfig& config);

// Parses the sectioned key-value format:
//   - '#' starts a comment; blank lines are skipped
//   - sections: [run] [env] [agent] [asrn]; a key before any section header,
//     an unknown section, or an unknown key is an error naming the offender
//   - omitted sections and keys keep their defaults
// [env] takes either preset = broken_armed|fig3 or a custom
// arms = mu:sigma, mu:sigma, ... list (never both). [asrn] must state
// enabled = true|false when present; its other keys require enabled = true.
ExperimentConfig parse_config(const std::string& text);

}  // namespace banditlab
