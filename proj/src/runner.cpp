#include "servo/runner.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <filesystem>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "servo/csvio.hpp"
#include "servo/rng.hpp"
#include "servo/svg.hpp"

namespace servo {

namespace {

std::string run_stem(const std::string& mode, std::uint32_t index) {
  return "servo_" + mode + "_seed" + std::to_string(index);
}

// A run that lost contact early can leave a degenerate (collinear or empty)
// trajectory; the batch still completes and reports what it can.
MetricReport evaluate_or_degenerate(const std::vector<Point2>& pts,
                                    const Shape& shape) {
  try {
    return evaluate_trajectory(pts, shape);
  } catch (const Error&) {
    MetricReport rep;
    rep.s100_percent = std::numeric_limits<double>::quiet_NaN();
    rep.n_points = pts.size();
    return rep;
  }
}

std::string summary_cell(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

}  // namespace

BatchResult run_simulate_batch(const AppConfig& config,
                               const std::vector<FilterMode>& modes,
                               std::uint32_t seeds, int jobs,
                               const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  struct Task {
    FilterMode mode;
    std::uint32_t index;
  };
  std::vector<Task> tasks;
  for (FilterMode mode : modes) {
    for (std::uint32_t i = 0; i < seeds; ++i) tasks.push_back({mode, i});
  }

  std::vector<RunResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size() || failed.load()) return;
      const Task& task = tasks[t];
      try {
        SimConfig sim = config.sim;
        sim.mode = task.mode;
        sim.seed = derive_run_seed(config.sim.seed, to_string(task.mode),
                                   task.index);
        const Trajectory traj = run_servo(sim);
        const std::vector<Point2> pts = traj.positions();

        RunResult r;
        r.mode = to_string(task.mode);
        r.seed_index = task.index;
        r.run_seed = sim.seed;
        r.steps = static_cast<int>(traj.steps.size());
        r.termination = traj.termination;
        r.report = evaluate_or_degenerate(pts, sim.shape);

        const std::string stem = run_stem(r.mode, task.index);
        r.trajectory_path = (fs::path(out_dir) / (stem + ".csv")).string();
        r.svg_path = (fs::path(out_dir) / (stem + ".svg")).string();
        r.report_path = (fs::path(out_dir) / (stem + ".json")).string();
        write_text_file(r.trajectory_path, trajectory_csv(traj));
        write_text_file(r.svg_path, trajectory_svg(sim.shape, pts));
        write_text_file(r.report_path, metric_report_json(r.report));
        results[t] = std::move(r);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed = true;
        failure_message = e.what();
        return;
      }
    }
  };

  const int n_threads =
      std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (failed.load()) {
    throw Error("simulation batch failed: " + failure_message);
  }

  // Summary and manifest are written once, by the orchestrator.
  BatchResult batch;
  batch.runs = std::move(results);
  std::string summary = "mode,seed,mae,mse,s100,term_reason,steps\n";
  for (const RunResult& r : batch.runs) {
    summary += r.mode + ',' + std::to_string(r.seed_index) + ',';
    summary += (r.report.mae_mm ? format_double(*r.report.mae_mm) : "") + ',';
    summary += (r.report.mse_mm2 ? format_double(*r.report.mse_mm2) : "") + ',';
    summary += summary_cell(r.report.s100_percent) + ',';
    summary += to_string(r.termination) + ',' + std::to_string(r.steps) + '\n';
    if (r.termination == Termination::contact_lost) ++batch.contact_lost_count;
  }
  batch.summary_path = (fs::path(out_dir) / "summary.csv").string();
  write_text_file(batch.summary_path, summary);

  const std::string snapshot_path =
      (fs::path(out_dir) / "config_snapshot.json").string();
  write_text_file(snapshot_path, config.snapshot);

  // Manifest references files relative to itself, so output directories stay
  // relocatable and reruns into different directories compare byte-equal.
  nlohmann::json manifest;
  manifest["config_snapshot"] = "config_snapshot.json";
  manifest["master_seed"] = config.sim.seed;
  manifest["summary"] = "summary.csv";
  nlohmann::json files = nlohmann::json::array();
  for (const RunResult& r : batch.runs) {
    files.push_back({{"mode", r.mode},
                     {"seed", r.seed_index},
                     {"run_seed", r.run_seed},
                     {"trajectory", fs::path(r.trajectory_path).filename().string()},
                     {"svg", fs::path(r.svg_path).filename().string()},
                     {"report", fs::path(r.report_path).filename().string()}});
  }
  manifest["runs"] = files;
  batch.manifest_path = (fs::path(out_dir) / "manifest.json").string();
  write_text_file(batch.manifest_path, manifest.dump(2) + "\n");
  return batch;
}

}  // namespace servo
