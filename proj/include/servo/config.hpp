#pragma once

#include <optional>
#include <string>

#include "servo/sim.hpp"

namespace servo {

/// Everything the tool reads from one JSON config file. `mode` stays unset
/// when the file omits it; the command line then decides.
struct AppConfig {
  SimConfig sim;
  SweepConfig sweep;
  std::optional<FilterMode> mode;
  std::string snapshot;  // raw bytes of the config file
};

/// Parse and validate a config file. Unknown keys are hard errors naming the
/// key path; missing required keys (shape) likewise. `base_dir` resolves
/// relative polyline CSV paths. SERVO_SIM_SEED in the environment overrides
/// the configured seed.
AppConfig load_app_config(const std::string& path);
AppConfig parse_app_config(const std::string& json_text,
                           const std::string& base_dir);

}  // namespace servo
