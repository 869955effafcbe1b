#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "servo/geometry.hpp"
#include "servo/sensor.hpp"

namespace servo {

// Floor on the posterior variance so an R = 0 update cannot produce a dead
// filter that ignores all future measurements.
constexpr double kMinStateVariance = 1e-12;

struct KfParams {
  double q{};    // process variance per step
  double x0{};   // explicit initialization, when not seeded from data
  double p0{1};

  void validate() const;  // q > 0, p0 > 0
};

struct KfState {
  double x_hat{};
  double p{};
  int k{};
};

struct KfPrior {
  double x_hat{};
  double p{};
};

/// Constant-state predict: x_hat carries over, variance grows by Q.
KfPrior kf_predict(const KfState& state, const KfParams& params);

/// Measurement update with per-step variance r. Throws NonFiniteInput when z
/// or r is not finite. r = 0 is a perfect measurement (gain 1, floored P).
KfState kf_update(const KfPrior& prior, double z, double r, int k);

KfState kf_step(const KfState& state, const KfParams& params,
                const Measurement& measurement);

/// Scalar filter for one pose parameter. The first measurement initializes
/// the state (x = mu, P = R) to avoid a transient from an arbitrary prior.
class ScalarKf {
 public:
  explicit ScalarKf(double q) : params_{q, 0.0, 1.0} {}

  KfState step(const Measurement& measurement);
  bool initialized() const { return initialized_; }
  const KfState& state() const { return state_; }

 private:
  KfParams params_;
  KfState state_{};
  bool initialized_{false};
};

/// Mean Gaussian negative log-likelihood: per sample
/// 0.5*ln(2*pi*var) + (truth - mu)^2 / (2*var). Throws ZeroVariance on any
/// var <= 0.
double nll(std::span<const double> mu, std::span<const double> var,
           std::span<const double> truth);

struct CalibrationPoint {
  double scale{};
  double nll{};
  double mae_x{};
  double mae_theta{};
};

struct CalibrationResult {
  std::vector<CalibrationPoint> points;
  double argmin_scale{};        // ties broken toward the smaller scale
  double mae_rank_corr_x{};     // Spearman of (scale, mae) across the sweep
  double mae_rank_corr_theta{};
};

/// Sweep model_noise_scale over `sweep` (ascending), re-running the sensor on
/// the labeled dataset at each value with common random numbers, and score
/// each value by the NLL of the fused (mu, R) against the labels.
CalibrationResult calibrate_model_noise(std::span<const double> sweep,
                                        std::span<const EdgePose> dataset,
                                        const NoiseProfile& profile,
                                        const McConfig& mc,
                                        std::uint64_t seed);

}  // namespace servo
