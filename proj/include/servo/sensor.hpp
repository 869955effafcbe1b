#pragma once

#include <vector>

#include "servo/geometry.hpp"
#include "servo/rng.hpp"

namespace servo {

/// Heteroscedastic noise shape for one pose parameter: standard deviation at
/// the center of the operating range and at its extreme.
struct ParamNoise {
  double sigma_center{};
  double sigma_edge{};
};

struct NoiseProfile {
  ParamNoise x{0.3, 0.75};       // mm
  ParamNoise theta{1.0, 2.5};    // deg
  double bias_coeff{0.1};        // center-ward shrink of the batch mean
  double outlier_prob{0.25};     // per batch, per parameter
  double outlier_scale{6.25};    // multiplier on sigma for outlier draws

  void validate() const;  // throws ConfigError
};

struct McConfig {
  int n{13};
  double model_noise_scale{1.0};

  void validate() const;
};

/// Monte-Carlo batch for one pose parameter: n per-sample means and data
/// variances, as the emulated probabilistic network would emit them.
struct McBatch {
  std::vector<double> u;
  std::vector<double> v;
};

/// Batches for both pose parameters of one contact.
struct PoseBatch {
  McBatch x;
  McBatch theta;
};

/// Fused per-parameter measurement: mean and total variance.
struct Measurement {
  double mu{};
  double r{};
};

struct PoseMeasurement {
  Measurement x;
  Measurement theta;
};

/// sigma(truth) = sigma_center + (sigma_edge - sigma_center) *
/// min(|truth|/range_limit, 1)^2.
double noise_profile_eval(const ParamNoise& noise, double truth,
                          double range_limit);

/// One parameter's batch. Draw order per batch: outlier Bernoulli, outlier
/// sign (only when hit), n sample means, n variance jitters. An outlier
/// event shifts the whole batch center by +-outlier_scale*sigma and widens
/// the sample spread by the same factor, so the fused R reflects it.
McBatch sample_param_batch(double truth, const ParamNoise& noise,
                           double range_limit, const NoiseProfile& profile,
                           const McConfig& mc, Rng& rng);

/// Both parameters; x batch drawn first, then theta.
PoseBatch sample_mc_batch(const EdgePose& truth, const NoiseProfile& profile,
                          const McConfig& mc, Rng& rng);

/// mu = mean(u); R = population variance of u plus mean of v. These are the
/// exact mean and variance of the equal-weight Gaussian mixture of the batch.
Measurement fuse_mc_batch(const McBatch& batch);

PoseMeasurement fuse_pose_batch(const PoseBatch& batch);

}  // namespace servo
