#include "servo/sensor.hpp"

#include <algorithm>
#include <cmath>

#include "servo/errors.hpp"

namespace servo {

void NoiseProfile::validate() const {
  auto check_param = [](const ParamNoise& pn, const char* name) {
    if (!(pn.sigma_center >= 0.0) || !std::isfinite(pn.sigma_center)) {
      throw ConfigError(std::string("noise.sigma_center_") + name +
                        " must be >= 0");
    }
    if (!(pn.sigma_edge >= pn.sigma_center) || !std::isfinite(pn.sigma_edge)) {
      throw ConfigError(std::string("noise.sigma_edge_") + name +
                        " must be >= sigma_center");
    }
  };
  check_param(x, "x");
  check_param(theta, "theta");
  if (!(bias_coeff >= 0.0) || !(bias_coeff < 1.0)) {
    throw ConfigError("noise.bias_coeff must lie in [0, 1)");
  }
  if (!(outlier_prob >= 0.0) || !(outlier_prob < 0.5)) {
    throw ConfigError("noise.outlier_prob must lie in [0, 0.5)");
  }
  if (!(outlier_scale >= 1.0) || !std::isfinite(outlier_scale)) {
    throw ConfigError("noise.outlier_scale must be >= 1");
  }
}

void McConfig::validate() const {
  if (n < 2) {
    throw ConfigError("mc.n must be >= 2 (between-sample variance undefined)");
  }
  if (!(model_noise_scale >= 0.0) || !std::isfinite(model_noise_scale)) {
    throw ConfigError("mc.model_noise_scale must be >= 0");
  }
}

double noise_profile_eval(const ParamNoise& noise, double truth,
                          double range_limit) {
  const double frac = std::min(std::abs(truth) / range_limit, 1.0);
  return noise.sigma_center + (noise.sigma_edge - noise.sigma_center) * frac * frac;
}

McBatch sample_param_batch(double truth, const ParamNoise& noise,
                           double range_limit, const NoiseProfile& profile,
                           const McConfig& mc, Rng& rng) {
  const double sigma = noise_profile_eval(noise, truth, range_limit);
  const double biased = (1.0 - profile.bias_coeff) * truth;

  // An outlier batch stands in for an input the model is unfamiliar with:
  // the batch center jumps and the samples disagree by the same factor, so
  // the fused total variance rises with the error it produces.
  double center = biased;
  double spread = mc.model_noise_scale * sigma;
  if (rng.uniform() < profile.outlier_prob) {
    const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
    center += sign * profile.outlier_scale * sigma;
    spread *= profile.outlier_scale;
  }

  McBatch batch;
  batch.u.resize(mc.n);
  batch.v.resize(mc.n);
  for (int t = 0; t < mc.n; ++t) {
    batch.u[t] = rng.normal(center, spread);
  }
  for (int t = 0; t < mc.n; ++t) {
    batch.v[t] = sigma * sigma * rng.uniform(0.8, 1.2);
  }
  return batch;
}

PoseBatch sample_mc_batch(const EdgePose& truth, const NoiseProfile& profile,
                          const McConfig& mc, Rng& rng) {
  PoseBatch out;
  out.x = sample_param_batch(truth.x_mm, profile.x, kXRangeMm, profile, mc, rng);
  out.theta = sample_param_batch(truth.theta_deg, profile.theta,
                                 kThetaRangeDeg, profile, mc, rng);
  return out;
}

Measurement fuse_mc_batch(const McBatch& batch) {
  const std::size_t n = batch.u.size();
  if (n < 2 || batch.v.size() != n) {
    throw Error("fuse_mc_batch needs matching u/v lists with n >= 2");
  }
  double mu = 0.0;
  for (double u : batch.u) mu += u;
  mu /= static_cast<double>(n);

  double var = 0.0;
  for (double u : batch.u) var += (u - mu) * (u - mu);
  var /= static_cast<double>(n);  // population variance

  double mean_v = 0.0;
  for (double v : batch.v) mean_v += v;
  mean_v /= static_cast<double>(n);

  return {mu, var + mean_v};
}

PoseMeasurement fuse_pose_batch(const PoseBatch& batch) {
  return {fuse_mc_batch(batch.x), fuse_mc_batch(batch.theta)};
}

}  // namespace servo
