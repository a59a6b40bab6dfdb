#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "tame/envsim.hpp"
#include "tame/evolution.hpp"

namespace tame {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything needed to reproduce a run. Text form is one `key = value` per
/// line; `#` starts a comment.
struct RunConfig {
  EnvConfig env;
  EvolutionConfig evolution;
};

RunConfig default_run_config(EnvClass c);

/// Unknown keys, malformed values and out-of-range counts raise ConfigError
/// naming the line. `env` is applied first so class defaults can be overridden.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

/// Every key with its resolved value, in a fixed order.
std::string to_text(const RunConfig& config);

/// shared-primitive, no-reset, lambda-one, no-noise.
void apply_ablation(RunConfig& config, std::string_view name);

/// Throws ConfigError if any field is out of range.
void check(const RunConfig& config);

}  // namespace tame
