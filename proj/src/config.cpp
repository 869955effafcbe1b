#include "servo/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "servo/csvio.hpp"
#include "servo/errors.hpp"

namespace servo {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown config key: " + path + key);
    }
  }
}

double get_number(const json& obj, const std::string& path,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw ConfigError("config key " + path + key + " must be a number");
  }
  return obj[key].get<double>();
}

Point2 get_point(const json& obj, const std::string& path,
                 const std::string& key, Point2 fallback) {
  if (!obj.contains(key)) return fallback;
  const json& arr = obj[key];
  if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() ||
      !arr[1].is_number()) {
    throw ConfigError("config key " + path + key + " must be [x, y]");
  }
  return {arr[0].get<double>(), arr[1].get<double>()};
}

Shape parse_shape(const json& obj, const std::string& base_dir) {
  if (!obj.is_object()) {
    throw ConfigError("config key shape must be an object");
  }
  if (!obj.contains("kind")) {
    throw ConfigError("missing config key: shape.kind");
  }
  const std::string kind = obj["kind"].get<std::string>();
  const std::string path = "shape.";
  if (kind == "disk") {
    reject_unknown_keys(obj, path, {"kind", "center", "radius_mm"});
    return Shape::disk(get_point(obj, path, "center", {0, 0}),
                       get_number(obj, path, "radius_mm", 50.0));
  }
  if (kind == "teardrop") {
    reject_unknown_keys(obj, path,
                        {"kind", "center", "radius_mm", "apex_half_angle_deg"});
    return Shape::teardrop(get_point(obj, path, "center", {0, 0}),
                           get_number(obj, path, "radius_mm", 30.0),
                           get_number(obj, path, "apex_half_angle_deg", 45.0));
  }
  if (kind == "clover") {
    reject_unknown_keys(
        obj, path, {"kind", "center", "base_radius_mm", "amplitude_mm", "lobes"});
    return Shape::clover(get_point(obj, path, "center", {0, 0}),
                         get_number(obj, path, "base_radius_mm", 40.0),
                         get_number(obj, path, "amplitude_mm", 10.0),
                         static_cast<int>(get_number(obj, path, "lobes", 4.0)));
  }
  if (kind == "polyline") {
    reject_unknown_keys(obj, path, {"kind", "csv", "vertices"});
    if (obj.contains("csv")) {
      std::filesystem::path p = obj["csv"].get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      return Shape::polyline(polyline_vertices_from_csv(p.string()));
    }
    if (!obj.contains("vertices")) {
      throw ConfigError("shape.polyline needs either 'csv' or 'vertices'");
    }
    std::vector<Point2> vs;
    for (const json& v : obj["vertices"]) {
      if (!v.is_array() || v.size() != 2) {
        throw ConfigError("shape.vertices entries must be [x, y]");
      }
      vs.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return Shape::polyline(std::move(vs));
  }
  throw ConfigError("shape.kind must be disk, teardrop, clover or polyline");
}

}  // namespace

AppConfig parse_app_config(const std::string& json_text,
                           const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  reject_unknown_keys(root, "",
                      {"seed", "steps", "delta_mm", "mode", "start_arc_length_mm",
                       "shape", "noise", "mc", "filter", "gains", "reference",
                       "sweep"});

  if (!root.contains("shape")) {
    throw ConfigError("missing config key: shape");
  }

  AppConfig app{SimConfig(parse_shape(root["shape"], base_dir)), SweepConfig{},
                std::nullopt, json_text};
  SimConfig& sim = app.sim;

  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) {
      throw ConfigError("config key seed must be a non-negative integer");
    }
    sim.seed = root["seed"].get<std::uint64_t>();
  }
  sim.max_steps = static_cast<int>(get_number(root, "", "steps", sim.max_steps));
  sim.delta_mm = get_number(root, "", "delta_mm", sim.delta_mm);
  sim.start_arc_length_mm =
      get_number(root, "", "start_arc_length_mm", sim.start_arc_length_mm);

  if (root.contains("mode")) {
    const std::string mode = root["mode"].get<std::string>();
    if (mode == "filtered") {
      app.mode = FilterMode::filtered;
    } else if (mode == "unfiltered") {
      app.mode = FilterMode::unfiltered;
    } else {
      throw ConfigError("config key mode must be 'filtered' or 'unfiltered'");
    }
  }

  if (root.contains("noise")) {
    const json& n = root["noise"];
    const std::string p = "noise.";
    reject_unknown_keys(n, p,
                        {"sigma_center_x", "sigma_edge_x", "sigma_center_theta",
                         "sigma_edge_theta", "bias_coeff", "outlier_prob",
                         "outlier_scale"});
    NoiseProfile& np = sim.noise;
    np.x.sigma_center = get_number(n, p, "sigma_center_x", np.x.sigma_center);
    np.x.sigma_edge = get_number(n, p, "sigma_edge_x", np.x.sigma_edge);
    np.theta.sigma_center =
        get_number(n, p, "sigma_center_theta", np.theta.sigma_center);
    np.theta.sigma_edge = get_number(n, p, "sigma_edge_theta", np.theta.sigma_edge);
    np.bias_coeff = get_number(n, p, "bias_coeff", np.bias_coeff);
    np.outlier_prob = get_number(n, p, "outlier_prob", np.outlier_prob);
    np.outlier_scale = get_number(n, p, "outlier_scale", np.outlier_scale);
  }

  if (root.contains("mc")) {
    const json& m = root["mc"];
    reject_unknown_keys(m, "mc.", {"n", "model_noise_scale"});
    sim.mc.n = static_cast<int>(get_number(m, "mc.", "n", sim.mc.n));
    sim.mc.model_noise_scale =
        get_number(m, "mc.", "model_noise_scale", sim.mc.model_noise_scale);
  }

  if (root.contains("filter")) {
    const json& f = root["filter"];
    reject_unknown_keys(f, "filter.", {"q_x", "q_theta"});
    sim.q_x = get_number(f, "filter.", "q_x", sim.q_x);
    sim.q_theta = get_number(f, "filter.", "q_theta", sim.q_theta);
  }

  if (root.contains("gains")) {
    const json& g = root["gains"];
    const std::string p = "gains.";
    reject_unknown_keys(g, p,
                        {"kp_x", "ki_x", "kp_theta", "ki_theta",
                         "integral_clamp_x", "integral_clamp_theta"});
    PiGains& pg = sim.gains;
    pg.kp_x = get_number(g, p, "kp_x", pg.kp_x);
    pg.ki_x = get_number(g, p, "ki_x", pg.ki_x);
    pg.kp_theta = get_number(g, p, "kp_theta", pg.kp_theta);
    pg.ki_theta = get_number(g, p, "ki_theta", pg.ki_theta);
    pg.integral_clamp_x = get_number(g, p, "integral_clamp_x", pg.integral_clamp_x);
    pg.integral_clamp_theta =
        get_number(g, p, "integral_clamp_theta", pg.integral_clamp_theta);
  }

  if (root.contains("reference")) {
    const json& r = root["reference"];
    reject_unknown_keys(r, "reference.", {"x_mm", "theta_deg"});
    sim.reference.x_mm = get_number(r, "reference.", "x_mm", sim.reference.x_mm);
    sim.reference.theta_deg =
        get_number(r, "reference.", "theta_deg", sim.reference.theta_deg);
  }

  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    const std::string p = "sweep.";
    reject_unknown_keys(
        s, p, {"records", "x_from", "x_to", "theta_from", "theta_to"});
    app.sweep.records =
        static_cast<int>(get_number(s, p, "records", app.sweep.records));
    app.sweep.x_from = get_number(s, p, "x_from", app.sweep.x_from);
    app.sweep.x_to = get_number(s, p, "x_to", app.sweep.x_to);
    app.sweep.theta_from = get_number(s, p, "theta_from", app.sweep.theta_from);
    app.sweep.theta_to = get_number(s, p, "theta_to", app.sweep.theta_to);
  }

  if (const char* env_seed = std::getenv("SERVO_SIM_SEED")) {
    try {
      sim.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      throw ConfigError("SERVO_SIM_SEED must be a non-negative integer");
    }
  }

  sim.validate();
  app.sweep.validate();
  return app;
}

AppConfig load_app_config(const std::string& path) {
  const std::string text = read_text_file(path);
  const std::string base =
      std::filesystem::path(path).parent_path().string();
  return parse_app_config(text, base.empty() ? "." : base);
}

}  // namespace servo
