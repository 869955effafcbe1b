#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "servo/config.hpp"
#include "servo/metrics.hpp"
#include "servo/sim.hpp"

namespace servo {

struct RunResult {
  std::string mode;
  std::uint32_t seed_index{};
  std::uint64_t run_seed{};
  int steps{};
  Termination termination{};
  MetricReport report;
  std::string trajectory_path;
  std::string svg_path;
  std::string report_path;
};

struct BatchResult {
  std::vector<RunResult> runs;
  std::string summary_path;
  std::string manifest_path;
  int contact_lost_count{};
};

/// Run `seeds` simulations per mode, concurrently up to `jobs`, writing one
/// trajectory CSV, one SVG and one metric report per run, then a summary CSV
/// and a manifest (with a byte-identical config snapshot) at the end.
BatchResult run_simulate_batch(const AppConfig& config,
                               const std::vector<FilterMode>& modes,
                               std::uint32_t seeds, int jobs,
                               const std::string& out_dir);

}  // namespace servo
