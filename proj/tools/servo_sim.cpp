#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "servo/config.hpp"
#include "servo/csvio.hpp"
#include "servo/errors.hpp"
#include "servo/metrics.hpp"
#include "servo/rng.hpp"
#include "servo/runner.hpp"
#include "servo/sim.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitContactLost = 3;

namespace fs = std::filesystem;
using namespace servo;

int cmd_simulate(const std::string& config_path, std::uint32_t seeds,
                 const std::string& mode, int jobs, const std::string& out) {
  const AppConfig config = load_app_config(config_path);

  std::vector<FilterMode> modes;
  if (mode == "both") {
    modes = {FilterMode::filtered, FilterMode::unfiltered};
  } else if (mode == "filtered") {
    modes = {FilterMode::filtered};
  } else if (mode == "unfiltered") {
    modes = {FilterMode::unfiltered};
  } else if (mode == "config") {
    modes = {config.mode.value_or(FilterMode::filtered)};
  } else {
    throw ConfigError("--mode must be filtered, unfiltered or both");
  }

  const BatchResult batch = run_simulate_batch(config, modes, seeds, jobs, out);
  std::cout << "wrote " << batch.runs.size() << " runs to " << out << "\n"
            << "summary: " << batch.summary_path << "\n";
  for (const RunResult& r : batch.runs) {
    std::cout << r.mode << " seed " << r.seed_index << ": "
              << (r.report.mae_mm ? "mae=" + format_double(*r.report.mae_mm) + " "
                                  : std::string())
              << "s100=" << format_double(r.report.s100_percent) << " "
              << to_string(r.termination) << " (" << r.steps << " steps)\n";
  }
  return batch.contact_lost_count > 0 ? kExitContactLost : 0;
}

int cmd_filter_offline(const std::string& config_path, const std::string& in,
                       bool generate, bool trace, const std::string& out) {
  const AppConfig config = load_app_config(config_path);
  fs::create_directories(out);

  std::vector<FusedRecord> fused;
  if (generate) {
    const auto records = generate_offline_dataset(
        config.sim.noise, config.sim.mc, config.sweep, config.sim.seed);
    write_text_file((fs::path(out) / "offline_batches.csv").string(),
                    offline_records_csv(records));
    if (trace) {
      write_text_file((fs::path(out) / "mc_trace.csv").string(),
                      mc_trace_csv(records));
    }
    fused = fuse_records(records);
  } else {
    if (in.empty()) {
      throw ConfigError("filter-offline needs --in <series.csv> or --generate");
    }
    fused = fused_records_from_csv(read_csv_file(in));
  }

  const OfflineSeries series =
      run_offline_filter(fused, config.sim.q_x, config.sim.q_theta);
  write_text_file((fs::path(out) / "offline_series.csv").string(),
                  offline_series_csv(series));

  std::string summary = "param,mae_unfiltered,mae_filtered,ratio\n";
  summary += "x," + format_double(series.mae_fused_x) + ',' +
             format_double(series.mae_filtered_x) + ',' +
             format_double(series.mae_filtered_x / series.mae_fused_x) + '\n';
  summary += "theta," + format_double(series.mae_fused_theta) + ',' +
             format_double(series.mae_filtered_theta) + ',' +
             format_double(series.mae_filtered_theta / series.mae_fused_theta) +
             '\n';
  write_text_file((fs::path(out) / "offline_summary.csv").string(), summary);
  std::cout << summary;
  return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& sweep_arg,
                  const std::string& out) {
  const AppConfig config = load_app_config(config_path);

  std::vector<double> sweep;
  std::stringstream ss(sweep_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      sweep.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("--sweep entries must be numbers: '" + tok + "'");
    }
  }

  // Labels only; batches are re-drawn per sweep value inside the calibration.
  const auto records = generate_offline_dataset(
      config.sim.noise, config.sim.mc, config.sweep, config.sim.seed);
  std::vector<EdgePose> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.truth);

  const CalibrationResult result = calibrate_model_noise(
      sweep, labels, config.sim.noise, config.sim.mc, config.sim.seed);

  fs::create_directories(out);
  write_text_file((fs::path(out) / "calibration.csv").string(),
                  calibration_csv(result));
  std::cout << "argmin_scale=" << format_double(result.argmin_scale) << "\n";
  return 0;
}

int cmd_metrics(const std::string& config_path, const std::string& traj_path,
                const std::string& out) {
  const AppConfig config = load_app_config(config_path);
  const auto positions =
      trajectory_positions_from_csv(read_csv_file(traj_path));
  const MetricReport report =
      evaluate_trajectory(positions, config.sim.shape);
  const std::string json = metric_report_json(report);
  if (!out.empty()) {
    write_text_file(out, json);
  }
  std::cout << json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware tactile servo simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string mode = "both";
  std::string in_path;
  std::string sweep = "0.25,0.5,1,2,4";
  std::string traj_path;
  std::string report_out;
  std::uint32_t seeds = 1;
  int jobs = 1;
  bool generate = false;
  bool trace = false;

  CLI::App* sim = app.add_subcommand("simulate", "Run servo batches");
  sim->add_option("--config", config_path, "JSON config file")->required();
  sim->add_option("--seeds", seeds, "Seeds per mode");
  sim->add_option("--mode", mode, "filtered|unfiltered|both");
  sim->add_option("--jobs", jobs, "Concurrent simulations");
  sim->add_option("--out", out_dir, "Output directory");

  CLI::App* off = app.add_subcommand("filter-offline", "Offline filtering run");
  off->add_option("--config", config_path, "JSON config file")->required();
  off->add_option("--in", in_path, "Input series CSV");
  off->add_flag("--generate", generate, "Generate a dataset from the config");
  off->add_flag("--trace", trace, "Also dump the per-sample MC trace CSV");
  off->add_option("--out", out_dir, "Output directory");

  CLI::App* cal = app.add_subcommand("calibrate", "Model-noise NLL sweep");
  cal->add_option("--config", config_path, "JSON config file")->required();
  cal->add_option("--sweep", sweep, "Comma-separated ascending scales");
  cal->add_option("--out", out_dir, "Output directory");

  CLI::App* met = app.add_subcommand("metrics", "Recompute trajectory metrics");
  met->add_option("--config", config_path, "JSON config file")->required();
  met->add_option("--traj", traj_path, "Trajectory CSV")->required();
  met->add_option("--out", report_out, "Report JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, seeds, mode, jobs, out_dir);
    if (off->parsed()) return cmd_filter_offline(config_path, in_path, generate, trace, out_dir);
    if (cal->parsed()) return cmd_calibrate(config_path, sweep, out_dir);
    if (met->parsed()) return cmd_metrics(config_path, traj_path, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const CsvError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
