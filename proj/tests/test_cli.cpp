#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "servo/config.hpp"
#include "servo/csvio.hpp"
#include "servo/metrics.hpp"
#include "servo/svg.hpp"

using namespace servo;
namespace fs = std::filesystem;

namespace {

const std::string kDiskConfig = R"({
  "seed": 3,
  "shape": {"kind": "disk", "center": [0, 0], "radius_mm": 50.0}
})";

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("servo_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  write_text_file(p.string(), text);
  return p.string();
}

#ifdef SERVO_SIM_BIN
int run_cli(const std::string& args) {
  const int rc = std::system((std::string(SERVO_SIM_BIN) + " " + args +
                              " > /dev/null 2>&1")
                                 .c_str());
  return WEXITSTATUS(rc);
}
#endif

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults fill everything but the shape") {
    const AppConfig app = parse_app_config(kDiskConfig, ".");
    CHECK(app.sim.seed == 3);
    CHECK(app.sim.delta_mm == 0.5);
    CHECK(app.sim.mc.n == 13);
    CHECK(app.sim.noise.x.sigma_center == 0.3);
    CHECK(app.sim.q_theta == 1.0);
    CHECK_FALSE(app.mode.has_value());
    CHECK(app.snapshot == kDiskConfig);
  }
  SUBCASE("missing shape names the key") {
    try {
      parse_app_config(R"({"seed": 1})", ".");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("shape") != std::string::npos);
    }
  }
  SUBCASE("unknown keys are hard errors naming the path") {
    try {
      parse_app_config(
          R"({"shape": {"kind": "disk"}, "noise": {"sigma_x": 1.0}})", ".");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("noise.sigma_x") != std::string::npos);
    }
  }
  SUBCASE("invalid JSON is a config error") {
    CHECK_THROWS_AS(parse_app_config("{", "."), ConfigError);
  }
  SUBCASE("mode strings") {
    const AppConfig app = parse_app_config(
        R"({"shape": {"kind": "disk"}, "mode": "unfiltered"})", ".");
    CHECK(app.mode == FilterMode::unfiltered);
    CHECK_THROWS_AS(
        parse_app_config(R"({"shape": {"kind": "disk"}, "mode": "off"})", "."),
        ConfigError);
  }
  SUBCASE("out-of-range values are rejected with their key meaning") {
    CHECK_THROWS_AS(
        parse_app_config(
            R"({"shape": {"kind": "disk"}, "noise": {"outlier_prob": 0.7}})",
            "."),
        ConfigError);
    CHECK_THROWS_AS(
        parse_app_config(R"({"shape": {"kind": "disk"}, "delta_mm": 0})", "."),
        ConfigError);
  }
  SUBCASE("environment seed override") {
    setenv("SERVO_SIM_SEED", "777", 1);
    const AppConfig app = parse_app_config(kDiskConfig, ".");
    unsetenv("SERVO_SIM_SEED");
    CHECK(app.sim.seed == 777);
  }
  SUBCASE("polyline from CSV") {
    const fs::path dir = temp_dir("polyline");
    write_text_file((dir / "square.csv").string(),
                    "x_mm,y_mm\n0,0\n10,0\n10,10\n0,10\n");
    const AppConfig app = parse_app_config(
        R"({"shape": {"kind": "polyline", "csv": "square.csv"}})",
        dir.string());
    const auto [p, a] = shape_perimeter_area(app.sim.shape);
    CHECK(p == doctest::Approx(40.0));
    CHECK(a == doctest::Approx(100.0));
  }
}

TEST_CASE("trajectory CSV round trip") {
  const AppConfig app = parse_app_config(kDiskConfig, ".");
  SimConfig cfg = app.sim;
  cfg.max_steps = 120;
  const Trajectory traj = run_servo(cfg);
  const std::string csv = trajectory_csv(traj);

  const CsvTable table = parse_csv(csv);
  CHECK(table.header.front() == "step");
  CHECK(table.header.back() == "term_reason");
  const std::vector<Point2> pts = trajectory_positions_from_csv(table);
  const std::vector<Point2> orig = traj.positions();
  REQUIRE(pts.size() == orig.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // %.17g round-trips doubles exactly
    CHECK(pts[i].x == orig[i].x);
    CHECK(pts[i].y == orig[i].y);
  }

  // Metrics recomputed from the CSV agree with the stored report.
  const MetricReport stored = evaluate_trajectory(orig, cfg.shape);
  const MetricReport recomputed = evaluate_trajectory(pts, cfg.shape);
  CHECK(std::abs(*stored.mae_mm - *recomputed.mae_mm) < 1e-9);
  CHECK(std::abs(stored.s100_percent - recomputed.s100_percent) < 1e-9);
}

TEST_CASE("offline CSV layouts") {
  SweepConfig sweep;
  sweep.records = 40;
  const auto records =
      generate_offline_dataset(NoiseProfile{}, McConfig{}, sweep, 21);

  SUBCASE("raw batch layout round-trips through fusion") {
    const std::string csv = offline_records_csv(records);
    const auto parsed = fused_records_from_csv(parse_csv(csv));
    const auto direct = fuse_records(records);
    REQUIRE(parsed.size() == direct.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      CHECK(parsed[i].measurement.x.mu ==
            doctest::Approx(direct[i].measurement.x.mu).epsilon(1e-12));
      CHECK(parsed[i].measurement.theta.r ==
            doctest::Approx(direct[i].measurement.theta.r).epsilon(1e-12));
    }
  }
  SUBCASE("pre-fused layout is consumed directly") {
    const OfflineSeries series = run_offline_filter(records, 0.01, 1.0);
    const std::string csv = offline_series_csv(series);
    const auto parsed = fused_records_from_csv(parse_csv(csv));
    REQUIRE(parsed.size() == records.size());
    CHECK(parsed[5].measurement.x.mu ==
          doctest::Approx(series.steps[5].measurement.x.mu));
  }
  SUBCASE("malformed rows carry row context") {
    try {
      parse_csv("a,b\n1\n");
      FAIL("expected CsvError");
    } catch (const CsvError& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_csv(""), CsvError);
  }
  SUBCASE("mc trace has one row per sample per parameter") {
    const std::string trace = mc_trace_csv(records);
    const CsvTable t = parse_csv(trace);
    CHECK(t.rows.size() == records.size() * 13 * 2);
  }
}

TEST_CASE("svg output sticks to the declared element subset") {
  const Shape disk = Shape::disk({0, 0}, 50.0);
  SimConfig cfg(disk);
  cfg.seed = 5;
  cfg.max_steps = 100;
  const Trajectory traj = run_servo(cfg);
  const std::string svg = trajectory_svg(disk, traj.positions());

  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("viewBox") != std::string::npos);
  CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);

  const std::set<std::string> allowed{"svg", "path", "polyline", "circle"};
  const std::regex tag("<([a-zA-Z]+)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag);
       it != std::sregex_iterator(); ++it) {
    CHECK(allowed.count((*it)[1].str()) == 1);
  }
}

#ifdef SERVO_SIM_BIN

TEST_CASE("command line contracts") {
  const fs::path dir = temp_dir("cli");
  const std::string cfg = write_config(dir, kDiskConfig);

  SUBCASE("simulate writes the promised files and exits 0") {
    const fs::path out = dir / "out";
    CHECK(run_cli("simulate --config " + cfg + " --seeds 1 --mode both --out " +
                  out.string()) == 0);
    int csvs = 0, svgs = 0;
    for (const auto& e : fs::directory_iterator(out)) {
      const std::string name = e.path().filename().string();
      if (name.rfind("servo_", 0) == 0 && e.path().extension() == ".csv") ++csvs;
      if (e.path().extension() == ".svg") ++svgs;
    }
    CHECK(csvs == 2);
    CHECK(svgs == 2);
    const CsvTable summary =
        parse_csv(read_text_file((out / "summary.csv").string()));
    CHECK(summary.rows.size() == 2);
    CHECK(read_text_file((out / "config_snapshot.json").string()) ==
          kDiskConfig);
  }
  SUBCASE("missing config key exits 2") {
    const std::string bad = write_config(dir, R"({"seed": 1})");
    CHECK(run_cli("simulate --config " + bad + " --out " +
                  (dir / "o2").string()) == 2);
  }
  SUBCASE("contact loss exits 3 but still writes the summary") {
    const std::string lost = write_config(dir, R"({
      "seed": 1,
      "shape": {"kind": "disk", "radius_mm": 50.0},
      "gains": {"kp_x": 0, "ki_x": 0, "kp_theta": 0, "ki_theta": 0}
    })");
    const fs::path out = dir / "o3";
    CHECK(run_cli("simulate --config " + lost + " --seeds 1 --mode filtered --out " +
                  out.string()) == 3);
    CHECK(fs::exists(out / "summary.csv"));
  }
  SUBCASE("descending calibration sweep exits 2") {
    CHECK(run_cli("calibrate --config " + cfg + " --sweep 2,1,0.5 --out " +
                  (dir / "o4").string()) == 2);
  }
  SUBCASE("calibrate prints a parseable argmin line") {
    const fs::path out = dir / "cal";
    const fs::path log = dir / "cal.log";
    const std::string small = write_config(dir, R"({
      "seed": 4,
      "shape": {"kind": "disk", "radius_mm": 50.0},
      "sweep": {"records": 200}
    })");
    const int rc = std::system((std::string(SERVO_SIM_BIN) + " calibrate --config " +
                                small + " --out " + out.string() + " > " +
                                log.string() + " 2>&1")
                                   .c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    const std::string text = read_text_file(log.string());
    CHECK(text.find("argmin_scale=") != std::string::npos);
    const CsvTable cal =
        parse_csv(read_text_file((out / "calibration.csv").string()));
    CHECK(cal.header ==
          std::vector<std::string>{"scale", "nll", "mae_x", "mae_theta"});
    CHECK(cal.rows.size() == 5);
  }
  SUBCASE("filter-offline on an empty CSV exits 2") {
    const fs::path empty = dir / "empty.csv";
    write_text_file(empty.string(), "");
    CHECK(run_cli("filter-offline --config " + cfg + " --in " + empty.string() +
                  " --out " + (dir / "o5").string()) == 2);
  }
  SUBCASE("filter-offline --generate --trace dumps the MC trace") {
    const std::string small = write_config(dir, R"({
      "seed": 4,
      "shape": {"kind": "disk", "radius_mm": 50.0},
      "sweep": {"records": 10}
    })");
    const fs::path out = dir / "o6";
    CHECK(run_cli("filter-offline --config " + small +
                  " --generate --trace --out " + out.string()) == 0);
    const CsvTable trace =
        parse_csv(read_text_file((out / "mc_trace.csv").string()));
    CHECK(trace.rows.size() == 10 * 13 * 2);
    CHECK(fs::exists(out / "offline_series.csv"));
    CHECK(fs::exists(out / "offline_summary.csv"));
  }
  SUBCASE("metrics subcommand reproduces the stored per-run report") {
    const fs::path out = dir / "o7";
    REQUIRE(run_cli("simulate --config " + cfg +
                    " --seeds 1 --mode filtered --out " + out.string()) == 0);
    const fs::path recomputed = dir / "recomputed.json";
    CHECK(run_cli("metrics --config " + cfg + " --traj " +
                  (out / "servo_filtered_seed0.csv").string() + " --out " +
                  recomputed.string()) == 0);
    CHECK(read_text_file(recomputed.string()) ==
          read_text_file((out / "servo_filtered_seed0.json").string()));
  }
  SUBCASE("unfiltered trajectories leave the filter columns empty") {
    const fs::path out = dir / "o8";
    REQUIRE(run_cli("simulate --config " + cfg +
                    " --seeds 1 --mode unfiltered --out " + out.string()) == 0);
    const CsvTable t = parse_csv(
        read_text_file((out / "servo_unfiltered_seed0.csv").string()));
    const int kf_col = t.column("kf_x");
    REQUIRE(kf_col >= 0);
    for (const auto& row : t.rows) {
      CHECK(row[static_cast<std::size_t>(kf_col)].empty());
    }
  }
  SUBCASE("manifest references existing files") {
    const fs::path out = dir / "o9";
    REQUIRE(run_cli("simulate --config " + cfg +
                    " --seeds 1 --mode both --out " + out.string()) == 0);
    const auto manifest = nlohmann::json::parse(
        read_text_file((out / "manifest.json").string()));
    CHECK(fs::exists(out / manifest["config_snapshot"].get<std::string>()));
    CHECK(fs::exists(out / manifest["summary"].get<std::string>()));
    for (const auto& run : manifest["runs"]) {
      CHECK(fs::exists(out / run["trajectory"].get<std::string>()));
      CHECK(fs::exists(out / run["svg"].get<std::string>()));
      CHECK(fs::exists(out / run["report"].get<std::string>()));
    }
  }
  SUBCASE("byte-identical reruns") {
    const fs::path out_a = dir / "rep_a";
    const fs::path out_b = dir / "rep_b";
    REQUIRE(run_cli("simulate --config " + cfg +
                    " --seeds 2 --mode both --jobs 4 --out " + out_a.string()) == 0);
    REQUIRE(run_cli("simulate --config " + cfg +
                    " --seeds 2 --mode both --jobs 1 --out " + out_b.string()) == 0);
    for (const auto& e : fs::directory_iterator(out_a)) {
      const std::string name = e.path().filename().string();
      CHECK(read_text_file(e.path().string()) ==
            read_text_file((out_b / name).string()));
    }
  }
}

#endif  // SERVO_SIM_BIN
