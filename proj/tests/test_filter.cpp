#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "servo/filter.hpp"
#include "servo/rng.hpp"

using namespace servo;

TEST_CASE("predict step") {
  const KfParams params{0.1, 0.0, 1.0};
  const KfPrior prior = kf_predict({2.0, 0.5, 3}, params);
  CHECK(prior.x_hat == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(prior.p == doctest::Approx(0.6).epsilon(1e-15));

  SUBCASE("Q = 0 is a static filter") {
    const KfPrior frozen = kf_predict({2.0, 0.5, 3}, {0.0, 0.0, 1.0});
    CHECK(frozen.p == 0.5);
  }
  SUBCASE("m predicts without updates grow P linearly") {
    KfState s{0.0, 0.25, 0};
    for (int m = 1; m <= 10; ++m) {
      const KfPrior pr = kf_predict(s, params);
      s = {pr.x_hat, pr.p, s.k + 1};
      CHECK(s.p == doctest::Approx(0.25 + m * 0.1).epsilon(1e-12));
    }
  }
}

TEST_CASE("update step") {
  SUBCASE("hand-evaluated example") {
    const KfState s = kf_update({0.0, 1.1}, 1.0, 0.5, 1);
    CHECK(s.x_hat == doctest::Approx(0.6875).epsilon(1e-12));
    CHECK(s.p == doctest::Approx(0.34375).epsilon(1e-12));
  }
  SUBCASE("vacuous measurement") {
    const KfState s = kf_update({3.0, 2.0}, -100.0, 1e12, 1);
    CHECK(std::abs(s.x_hat - 3.0) / 3.0 < 1e-9);
    CHECK(std::abs(s.p - 2.0) / 2.0 < 1e-9);
  }
  SUBCASE("perfect measurement floors P") {
    const KfState s = kf_update({3.0, 2.0}, 7.0, 0.0, 1);
    CHECK(s.x_hat == 7.0);
    CHECK(s.p == kMinStateVariance);
  }
  SUBCASE("non-finite input throws") {
    CHECK_THROWS_AS(
        kf_update({0.0, 1.0}, std::numeric_limits<double>::quiet_NaN(), 1.0, 1),
        NonFiniteInput);
    CHECK_THROWS_AS(
        kf_update({0.0, 1.0}, 0.0, std::numeric_limits<double>::infinity(), 1),
        NonFiniteInput);
    CHECK_THROWS_AS(kf_update({0.0, 1.0}, 0.0, -1.0, 1), NonFiniteInput);
  }
}

TEST_CASE("update equals the Gaussian posterior fusion") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const double xm = rng.uniform(-100.0, 100.0);
    const double pm = std::exp(rng.uniform(std::log(1e-6), std::log(1e3)));
    const double z = rng.uniform(-100.0, 100.0);
    const double r = std::exp(rng.uniform(std::log(1e-6), std::log(1e3)));
    const KfState s = kf_update({xm, pm}, z, r, 1);
    const auto [x_ref, p_ref] = oracles::gaussian_posterior(xm, pm, z, r);
    CHECK(std::abs(s.x_hat - x_ref) <=
          1e-12 * std::max(1.0, std::abs(x_ref)));
    CHECK(std::abs(s.p - p_ref) <= 1e-12 * p_ref);
  }
}

TEST_CASE("gain properties") {
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    const double pm = std::exp(rng.uniform(std::log(1e-6), std::log(1e3)));
    const double r = std::exp(rng.uniform(std::log(1e-6), std::log(1e3)));
    const KfState s = kf_update({0.0, pm}, 1.0, r, 1);
    const double k = s.x_hat;  // x = 0 + K*(1 - 0) = K
    CHECK(k >= 0.0);
    CHECK(k <= 1.0);
    CHECK(s.p <= pm);  // variance never grows across an update
    // Monotonicity in R and P-.
    const double k_bigger_r = kf_update({0.0, pm}, 1.0, 2.0 * r, 1).x_hat;
    CHECK(k_bigger_r <= k + 1e-15);
    const double k_bigger_p = kf_update({0.0, 2.0 * pm}, 1.0, r, 1).x_hat;
    CHECK(k_bigger_p >= k - 1e-15);
  }
}

TEST_CASE("constant stream converges to the fixed point") {
  const KfParams params{0.01, 0.0, 1.0};
  KfState s{0.0, 1.0, 0};
  for (int i = 0; i < 500; ++i) {
    s = kf_step(s, params, {5.0, 0.5});
  }
  CHECK(s.x_hat == doctest::Approx(5.0).epsilon(1e-9));
  const double p_star = oracles::kf_steady_state_p(0.01, 0.5);
  CHECK(std::abs(s.p - p_star) < 1e-9);
}

TEST_CASE("a flagged outlier moves the estimate by K of the jump") {
  KfState s{0.0, 0.05, 0};
  const KfParams params{0.01, 0.0, 1.0};
  const double jump = 10.0;
  const double big_r = 25.0;  // the sensor knows the value is unreliable
  const KfPrior prior = kf_predict(s, params);
  const double gain = prior.p / (prior.p + big_r);
  const KfState after = kf_step(s, params, {jump, big_r});
  CHECK(std::abs(after.x_hat - s.x_hat) ==
        doctest::Approx(gain * jump).epsilon(1e-12));
  CHECK(std::abs(after.x_hat) < 0.1 * jump);
}

TEST_CASE("alternating measurements settle into a bounded two-cycle") {
  // With R = Q the steady prior solves p = (p+q)q/(p+q+q)... use the oracle.
  const double q = 0.2;
  const KfParams params{q, 0.0, 1.0};
  KfState s{0.0, 1.0, 0};
  double amp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double z = (i % 2 == 0) ? 1.0 : -1.0;
    s = kf_step(s, params, {z, q});
    if (i >= 80) amp = std::max(amp, std::abs(s.x_hat));
    if (i >= 80) CHECK(std::abs(s.x_hat) < 1.0);
  }
  const double p_star = oracles::kf_steady_state_p(q, q);
  const double k_star = (p_star + q) / (p_star + q + q);
  CHECK(amp == doctest::Approx(k_star / (2.0 - k_star)).epsilon(1e-6));
}

TEST_CASE("sign symmetry: negated measurements give the negated trajectory") {
  Rng rng(31);
  std::vector<double> zs, rs;
  for (int i = 0; i < 200; ++i) {
    zs.push_back(rng.uniform(-3.0, 3.0));
    rs.push_back(rng.uniform(0.1, 2.0));
  }
  ScalarKf pos(0.05), neg(0.05);
  for (int i = 0; i < 200; ++i) {
    const KfState a = pos.step({zs[i], rs[i]});
    const KfState b = neg.step({-zs[i], rs[i]});
    CHECK(b.x_hat == doctest::Approx(-a.x_hat).epsilon(1e-15));
    CHECK(b.p == a.p);
  }
}

TEST_CASE("nll values") {
  const double half_ln_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  SUBCASE("single standard-normal sample at the mean") {
    const double mu[] = {0.0}, var[] = {1.0}, y[] = {0.0};
    CHECK(nll(mu, var, y) == doctest::Approx(half_ln_2pi).epsilon(1e-12));
    CHECK(nll(mu, var, y) == doctest::Approx(0.9189385332046727).epsilon(1e-12));
  }
  SUBCASE("zero residual leaves only the log term") {
    const double c = 0.37;
    const double mu[] = {1.0, 2.0}, var[] = {c, c}, y[] = {1.0, 2.0};
    CHECK(nll(mu, var, y) ==
          doctest::Approx(0.5 * std::log(2.0 * std::numbers::pi * c)).epsilon(1e-12));
  }
  SUBCASE("zero variance throws") {
    const double mu[] = {0.0}, var[] = {0.0}, y[] = {0.0};
    CHECK_THROWS_AS(nll(mu, var, y), ZeroVariance);
  }
  SUBCASE("true variance beats over- and under-confidence") {
    Rng rng(8);
    const double true_var = 0.8;
    std::vector<double> y(10000), mu(10000);
    for (std::size_t i = 0; i < y.size(); ++i) {
      mu[i] = 0.0;
      y[i] = rng.normal(0.0, std::sqrt(true_var));
    }
    auto fixed_var_nll = [&](double v) {
      const std::vector<double> var(y.size(), v);
      return nll(mu, var, y);
    };
    const double at_truth = fixed_var_nll(true_var);
    CHECK(at_truth < fixed_var_nll(10.0 * true_var));
    CHECK(at_truth < fixed_var_nll(0.1 * true_var));
  }
}

TEST_CASE("calibration sweep") {
  SUBCASE("single-element sweep returns that element") {
    const double sweep[] = {0.7};
    const std::vector<EdgePose> data(50, EdgePose{1.0, -10.0});
    const CalibrationResult r =
        calibrate_model_noise(sweep, data, NoiseProfile{}, McConfig{}, 3);
    CHECK(r.argmin_scale == 0.7);
  }
  SUBCASE("descending sweep is rejected") {
    const double sweep[] = {1.0, 0.5};
    const std::vector<EdgePose> data(10, EdgePose{0.0, 0.0});
    CHECK_THROWS_AS(
        calibrate_model_noise(sweep, data, NoiseProfile{}, McConfig{}, 3),
        ConfigError);
  }
  SUBCASE("the generating scale minimizes NLL") {
    const double sweep[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<EdgePose> data;
    for (int i = 0; i < 800; ++i) {
      const double f = i / 799.0;
      data.push_back({-kXRangeMm + 2 * kXRangeMm * f,
                      -kThetaRangeDeg + 2 * kThetaRangeDeg * f});
    }
    const CalibrationResult r =
        calibrate_model_noise(sweep, data, NoiseProfile{}, McConfig{}, 17);
    CHECK(r.argmin_scale == 1.0);
  }
}

TEST_CASE("scalar filter initializes from the first measurement") {
  ScalarKf kf(0.01);
  CHECK_FALSE(kf.initialized());
  const KfState s = kf.step({2.5, 0.3});
  CHECK(s.x_hat == 2.5);
  CHECK(s.p == 0.3);
  CHECK(kf.initialized());
}
