#include "servo/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "servo/errors.hpp"
#include "servo/rng.hpp"

namespace servo {

void KfParams::validate() const {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw ConfigError("filter process variance q must be > 0");
  }
  if (!(p0 > 0.0) || !std::isfinite(p0)) {
    throw ConfigError("filter p0 must be > 0");
  }
}

KfPrior kf_predict(const KfState& state, const KfParams& params) {
  return {state.x_hat, state.p + params.q};
}

KfState kf_update(const KfPrior& prior, double z, double r, int k) {
  if (!std::isfinite(z) || !std::isfinite(r)) {
    throw NonFiniteInput("kf_update received a non-finite measurement");
  }
  if (r < 0.0) {
    throw NonFiniteInput("kf_update received a negative measurement variance");
  }
  const double gain = prior.p / (prior.p + r);
  const double x = prior.x_hat + gain * (z - prior.x_hat);
  // 1 - gain evaluated as r/(p + r): the subtraction loses all precision in
  // the near-perfect-measurement limit.
  const double complement = r / (prior.p + r);
  const double p = std::max(complement * prior.p, kMinStateVariance);
  return {x, p, k};
}

KfState kf_step(const KfState& state, const KfParams& params,
                const Measurement& measurement) {
  return kf_update(kf_predict(state, params), measurement.mu, measurement.r,
                   state.k + 1);
}

KfState ScalarKf::step(const Measurement& measurement) {
  if (!initialized_) {
    if (!std::isfinite(measurement.mu) || !std::isfinite(measurement.r)) {
      throw NonFiniteInput("filter initialization from a non-finite measurement");
    }
    state_ = {measurement.mu, std::max(measurement.r, kMinStateVariance), 0};
    initialized_ = true;
    return state_;
  }
  state_ = kf_step(state_, params_, measurement);
  return state_;
}

double nll(std::span<const double> mu, std::span<const double> var,
           std::span<const double> truth) {
  if (mu.size() != var.size() || mu.size() != truth.size() || mu.empty()) {
    throw Error("nll requires non-empty lists of equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(var[i] > 0.0)) {
      throw ZeroVariance("nll requires positive variances");
    }
    const double resid = truth[i] - mu[i];
    total += 0.5 * std::log(2.0 * std::numbers::pi * var[i]) +
             resid * resid / (2.0 * var[i]);
  }
  return total / static_cast<double>(mu.size());
}

namespace {

// Spearman rank correlation; values here are continuous so plain ranks do.
double rank_correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  auto ranks = [n](std::span<const double> v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
      r[idx[pos]] = static_cast<double>(pos);
    }
    return r;
  };
  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  const double mean = (static_cast<double>(n) - 1.0) / 2.0;
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (ra[i] - mean) * (rb[i] - mean);
    da += (ra[i] - mean) * (ra[i] - mean);
    db += (rb[i] - mean) * (rb[i] - mean);
  }
  if (da == 0.0 || db == 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

}  // namespace

CalibrationResult calibrate_model_noise(std::span<const double> sweep,
                                        std::span<const EdgePose> dataset,
                                        const NoiseProfile& profile,
                                        const McConfig& mc,
                                        std::uint64_t seed) {
  if (sweep.empty()) {
    throw ConfigError("calibration sweep must be non-empty");
  }
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (!(sweep[i] > sweep[i - 1])) {
      throw ConfigError("calibration sweep must be strictly ascending");
    }
  }
  if (dataset.empty()) {
    throw ConfigError("calibration dataset must be non-empty");
  }

  CalibrationResult result;
  result.points.reserve(sweep.size());

  for (double scale : sweep) {
    // Common random numbers: the same stream at every sweep value, so the
    // comparison across scales is not dominated by sampling noise.
    Rng rng(splitmix64(seed));
    McConfig mc_s = mc;
    mc_s.model_noise_scale = scale;

    std::vector<double> mus, vars, truths;
    mus.reserve(2 * dataset.size());
    vars.reserve(2 * dataset.size());
    truths.reserve(2 * dataset.size());
    double abs_err_x = 0.0, abs_err_theta = 0.0;
    for (const EdgePose& truth : dataset) {
      const PoseBatch batch = sample_mc_batch(truth, profile, mc_s, rng);
      const PoseMeasurement m = fuse_pose_batch(batch);
      mus.push_back(m.x.mu);
      vars.push_back(m.x.r);
      truths.push_back(truth.x_mm);
      mus.push_back(m.theta.mu);
      vars.push_back(m.theta.r);
      truths.push_back(truth.theta_deg);
      abs_err_x += std::abs(m.x.mu - truth.x_mm);
      abs_err_theta += std::abs(m.theta.mu - truth.theta_deg);
    }
    const double n = static_cast<double>(dataset.size());
    result.points.push_back({scale, nll(mus, vars, truths), abs_err_x / n,
                             abs_err_theta / n});
  }

  result.argmin_scale = result.points.front().scale;
  double best = result.points.front().nll;
  for (const CalibrationPoint& p : result.points) {
    if (p.nll < best) {  // strict: ties resolve toward the smaller scale
      best = p.nll;
      result.argmin_scale = p.scale;
    }
  }

  std::vector<double> scales, maes_x, maes_theta;
  for (const CalibrationPoint& p : result.points) {
    scales.push_back(p.scale);
    maes_x.push_back(p.mae_x);
    maes_theta.push_back(p.mae_theta);
  }
  result.mae_rank_corr_x = rank_correlation(scales, maes_x);
  result.mae_rank_corr_theta = rank_correlation(scales, maes_theta);
  return result;
}

}  // namespace servo
