#include "servo/sim.hpp"

#include <cmath>

#include "servo/errors.hpp"
#include "servo/rng.hpp"

namespace servo {

namespace {
constexpr int kMinStepsBeforeClosure = 50;
}

std::string to_string(FilterMode mode) {
  return mode == FilterMode::filtered ? "filtered" : "unfiltered";
}

std::string to_string(Termination term) {
  switch (term) {
    case Termination::max_steps: return "max_steps";
    case Termination::closed_loop: return "closed_loop";
    case Termination::contact_lost: return "contact_lost";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (max_steps < 1) throw ConfigError("steps must be >= 1");
  if (!(delta_mm > 0.0)) throw ConfigError("delta_mm must be > 0");
  noise.validate();
  mc.validate();
  KfParams{q_x, 0.0, 1.0}.validate();
  KfParams{q_theta, 0.0, 1.0}.validate();
  gains.validate();
  if (std::abs(reference.x_mm) > kXRangeMm ||
      std::abs(reference.theta_deg) > kThetaRangeDeg) {
    throw ConfigError("reference pose must lie within the sensor ranges");
  }
}

std::vector<Point2> Trajectory::positions() const {
  std::vector<Point2> out;
  out.reserve(steps.size());
  for (const TrajectoryStep& s : steps) out.push_back(s.pose.origin);
  return out;
}

Trajectory run_servo(const SimConfig& config) {
  config.validate();
  Rng rng(config.seed);

  const ContourSample start = config.shape.contour_point(config.start_arc_length_mm);
  Frame2 frame{start.point, start.tangent_rad};
  const Point2 start_origin = frame.origin;

  ScalarKf kf_x(config.q_x);
  ScalarKf kf_theta(config.q_theta);
  PiState pi_state;

  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(config.max_steps));
  traj.termination = Termination::max_steps;

  for (int k = 0; k < config.max_steps; ++k) {
    EdgePoseResult gt;
    try {
      gt = local_edge_pose(config.shape, frame);
    } catch (const ContactLost& lost) {
      traj.termination = Termination::contact_lost;
      traj.final_contact_distance_mm = lost.distance_mm();
      break;
    }

    const PoseBatch batch = sample_mc_batch(gt.pose, config.noise, config.mc, rng);
    const PoseMeasurement meas = fuse_pose_batch(batch);

    EdgePose estimate{meas.x.mu, meas.theta.mu};
    std::optional<KfState> state_x, state_theta;
    if (config.mode == FilterMode::filtered) {
      state_x = kf_x.step(meas.x);
      state_theta = kf_theta.step(meas.theta);
      estimate = {state_x->x_hat, state_theta->x_hat};
    }

    const PiOutput out = pi_control(estimate, config.reference, config.gains,
                                    pi_state, config.delta_mm);
    pi_state = out.state;

    traj.steps.push_back({k, frame, gt.pose, gt.pose.within_sensor_range(),
                          meas, state_x, state_theta, out.command});

    frame = to_base_frame(out.command, frame);

    if (k + 1 >= kMinStepsBeforeClosure &&
        distance(frame.origin, start_origin) <= config.delta_mm) {
      traj.termination = Termination::closed_loop;
      break;
    }
  }
  return traj;
}

OfflineSeries run_offline_filter(std::span<const FusedRecord> series,
                                 double q_x, double q_theta) {
  if (series.empty()) {
    throw Error("run_offline_filter: empty series");
  }
  ScalarKf kf_x(q_x);
  ScalarKf kf_theta(q_theta);

  OfflineSeries out;
  out.steps.reserve(series.size());
  double ae_fused_x = 0.0, ae_filt_x = 0.0;
  double ae_fused_theta = 0.0, ae_filt_theta = 0.0;
  for (const FusedRecord& rec : series) {
    const KfState sx = kf_x.step(rec.measurement.x);
    const KfState st = kf_theta.step(rec.measurement.theta);
    out.steps.push_back({rec.truth, rec.measurement, sx, st});
    ae_fused_x += std::abs(rec.measurement.x.mu - rec.truth.x_mm);
    ae_filt_x += std::abs(sx.x_hat - rec.truth.x_mm);
    ae_fused_theta += std::abs(rec.measurement.theta.mu - rec.truth.theta_deg);
    ae_filt_theta += std::abs(st.x_hat - rec.truth.theta_deg);
  }
  const double n = static_cast<double>(series.size());
  out.mae_fused_x = ae_fused_x / n;
  out.mae_filtered_x = ae_filt_x / n;
  out.mae_fused_theta = ae_fused_theta / n;
  out.mae_filtered_theta = ae_filt_theta / n;
  return out;
}

OfflineSeries run_offline_filter(std::span<const OfflineRecord> series,
                                 double q_x, double q_theta) {
  return run_offline_filter(fuse_records(series), q_x, q_theta);
}

void SweepConfig::validate() const {
  if (records < 1) throw ConfigError("sweep.records must be >= 1");
  for (double v : {x_from, x_to, theta_from, theta_to}) {
    if (!std::isfinite(v)) throw ConfigError("sweep bounds must be finite");
  }
}

std::vector<OfflineRecord> generate_offline_dataset(const NoiseProfile& profile,
                                                    const McConfig& mc,
                                                    const SweepConfig& sweep,
                                                    std::uint64_t seed) {
  sweep.validate();
  profile.validate();
  mc.validate();
  Rng rng(seed);

  std::vector<OfflineRecord> records;
  records.reserve(static_cast<std::size_t>(sweep.records));
  const double denom = sweep.records > 1 ? sweep.records - 1.0 : 1.0;
  for (int i = 0; i < sweep.records; ++i) {
    const double f = static_cast<double>(i) / denom;
    const EdgePose truth{sweep.x_from + f * (sweep.x_to - sweep.x_from),
                         sweep.theta_from + f * (sweep.theta_to - sweep.theta_from)};
    records.push_back({truth, sample_mc_batch(truth, profile, mc, rng)});
  }
  return records;
}

std::vector<FusedRecord> fuse_records(std::span<const OfflineRecord> records) {
  std::vector<FusedRecord> fused;
  fused.reserve(records.size());
  for (const OfflineRecord& rec : records) {
    fused.push_back({rec.truth, fuse_pose_batch(rec.batch)});
  }
  return fused;
}

}  // namespace servo
