#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "servo/control.hpp"
#include "servo/filter.hpp"
#include "servo/geometry.hpp"
#include "servo/sensor.hpp"

namespace servo {

enum class FilterMode { filtered, unfiltered };

enum class Termination { max_steps, closed_loop, contact_lost };

std::string to_string(FilterMode mode);
std::string to_string(Termination term);

struct SimConfig {
  explicit SimConfig(Shape s) : shape(std::move(s)) {}

  Shape shape;
  int max_steps{2000};
  double delta_mm{0.5};
  FilterMode mode{FilterMode::filtered};
  std::uint64_t seed{0};
  NoiseProfile noise;
  McConfig mc;
  double q_x{0.01};    // mm^2 per step
  double q_theta{1.0}; // deg^2 per step
  PiGains gains;
  ReferencePose reference;
  double start_arc_length_mm{0.0};

  void validate() const;  // throws ConfigError
};

struct TrajectoryStep {
  int step{};
  Frame2 pose;  // world pose the measurements were taken from
  EdgePose ground_truth;
  bool gt_in_range{};
  PoseMeasurement measurement;
  std::optional<KfState> kf_x;      // empty in unfiltered mode
  std::optional<KfState> kf_theta;
  ControlCommand command;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  Termination termination{Termination::max_steps};
  double final_contact_distance_mm{};  // diagnostic for contact_lost

  std::vector<Point2> positions() const;
};

/// Closed-loop servo run: ground truth -> sensor batch -> fusion ->
/// (Kalman step when filtered) -> PI control -> frame transform, starting
/// on-contour and tangent-aligned at the configured arc length. Terminates on
/// loop closure (after >= 50 steps, within delta of the start), max steps, or
/// contact loss. Deterministic in (config, seed).
Trajectory run_servo(const SimConfig& config);

struct OfflineRecord {
  EdgePose truth;
  PoseBatch batch;
};

struct FusedRecord {
  EdgePose truth;
  PoseMeasurement measurement;
};

struct OfflineStep {
  EdgePose truth;
  PoseMeasurement measurement;
  KfState kf_x;
  KfState kf_theta;
};

struct OfflineSeries {
  std::vector<OfflineStep> steps;
  double mae_fused_x{};
  double mae_filtered_x{};
  double mae_fused_theta{};
  double mae_filtered_theta{};
};

/// Run the two scalar filters over an ordered series of fused measurements.
OfflineSeries run_offline_filter(std::span<const FusedRecord> series,
                                 double q_x, double q_theta);

/// Fuse raw batches first, then filter.
OfflineSeries run_offline_filter(std::span<const OfflineRecord> series,
                                 double q_x, double q_theta);

struct SweepConfig {
  int records{1000};
  double x_from{-kXRangeMm};
  double x_to{kXRangeMm};
  double theta_from{-kThetaRangeDeg};
  double theta_to{kThetaRangeDeg};

  void validate() const;
};

/// Ordered truth sweep (both parameters linearly interpolated across their
/// ranges, endpoints inclusive) with sampled batches. Reproducible by seed.
std::vector<OfflineRecord> generate_offline_dataset(
    const NoiseProfile& profile, const McConfig& mc, const SweepConfig& sweep,
    std::uint64_t seed);

std::vector<FusedRecord> fuse_records(std::span<const OfflineRecord> records);

}  // namespace servo
