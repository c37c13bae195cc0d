#include <chaos_forge/fbm_breuer_major.hpp>
#include <chaos_forge/malliavin_ops.hpp>

#include <gtest/gtest.h>

#include <Eigen/Cholesky>

#include <cmath>

namespace cf = chaos_forge;

namespace {

/// Direct ½(|r+1|^{2H} − 2|r|^{2H} + |r−1|^{2H}) from the fBm covariance, for moderate r.
double rho_direct(double H, double r) {
  return 0.5 * (std::pow(std::abs(r + 1), 2 * H) - 2 * std::pow(std::abs(r), 2 * H) + std::pow(std::abs(r - 1), 2 * H));
}

}  // namespace

TEST(FbmModel, AutocovarianceExamples) {
  EXPECT_EQ(cf::fbm_autocovariance(0.3, 0), 1.0);
  EXPECT_NEAR(cf::fbm_autocovariance(0.75, 1), 0.5 * (std::pow(2.0, 1.5) - 2.0), 1e-15);
  EXPECT_NEAR(cf::fbm_autocovariance(0.75, 1), 0.41421356237309503, 1e-14);
  for (long r = 1; r < 50; ++r) {
    EXPECT_NEAR(cf::fbm_autocovariance(0.5, r), 0.0, 1e-15);
    for (double H : {0.1, 0.3, 0.55, 0.7, 0.9}) EXPECT_NEAR(cf::fbm_autocovariance(H, r), rho_direct(H, r), 1e-12);
  }
  for (long r : {10L, 100L, 10000L}) EXPECT_LT(cf::fbm_autocovariance(0.1, r), 0.0);
  // Asymptotic H(2H−1)r^{2H−2}.
  const double r = 1e6;
  EXPECT_NEAR(cf::fbm_autocovariance(0.7, 1000000) / (0.7 * 0.4 * std::pow(r, -0.6)), 1.0, 1e-9);
  EXPECT_THROW(cf::fbm_autocovariance(1.0, 2), cf::DomainError);
}

TEST(FbmModel, BuildModel) {
  const auto m = cf::build_model(0.5, 16);
  EXPECT_TRUE(m.covariance.isApprox(Eigen::MatrixXd::Identity(16, 16), 1e-15));
  for (double H : {0.1, 0.55, 0.75, 0.95}) {
    const auto mh = cf::build_model(H, 64);
    EXPECT_TRUE(mh.covariance.isApprox(mh.covariance.transpose()));
    EXPECT_GE(mh.spectrum.minCoeff(), -1e-8 * 64);
    EXPECT_NEAR(mh.spectrum.sum(), 64.0, 1e-9);
  }
  EXPECT_THROW(cf::build_model(0.0, 8), cf::DomainError);
  EXPECT_THROW(cf::build_model(0.5, 1), cf::DomainError);
}

TEST(BreuerMajor, SigmaExamples) {
  EXPECT_NEAR(cf::breuer_major_sigma_squared(0.5), 2.0, 1e-15);
  const double s = cf::breuer_major_sigma_squared(0.55, 2000);
  EXPECT_GT(s, 2.0);
  EXPECT_NEAR(cf::breuer_major_sigma_squared(0.55, 4000), s, 1e-6 * s);
  EXPECT_THROW(cf::breuer_major_sigma(0.75), cf::ConvergenceError);
  EXPECT_THROW(cf::breuer_major_sigma(0.55, 10), cf::DomainError);

  // The normalized exact variance approaches σ² from the finite-n side.
  for (double H : {0.3, 0.55, 0.7}) {
    const double sigma2 = cf::breuer_major_sigma_squared(H);
    const double v = cf::quadratic_variation_variance(H, 200000) / 200000.0;
    EXPECT_NEAR(v / sigma2, 1.0, H < 0.6 ? 1e-4 : 5e-2) << H;
  }
}

TEST(BreuerMajor, CriticalSigmaFit) {
  const auto fit = cf::critical_sigma_fit(cf::default_n_grid());
  EXPECT_NEAR(fit.sigma_squared, 9.0 / 16.0, 0.02);
}

TEST(ExactTvBound, HalfClosedForm) {
  for (std::size_t n : {16u, 128u, 256u}) {
    const auto q = cf::exact_tv_bound(0.5, n);
    EXPECT_NEAR(q.tv_bound, 2.0 * std::sqrt(2.0 / n), 1e-12);
    EXPECT_NEAR(q.var_exact, 1.0, 1e-12);
    for (double l : q.eigenvalues) EXPECT_NEAR(l, 1.0 / std::sqrt(2.0 * n), 1e-14);
  }
  EXPECT_NEAR(cf::exact_tv_bound(0.5, 128).tv_bound, 0.25, 1e-12);
  EXPECT_NEAR(cf::exact_tv_bound(0.5, 256).tv_bound / cf::exact_tv_bound(0.5, 128).tv_bound, 1.0 / std::sqrt(2.0),
              1e-12);
  EXPECT_THROW(cf::exact_tv_bound(0.8, 64), cf::DomainError);
}

TEST(ExactTvBound, NonnegativeAndDecreasing) {
  for (double H : {0.2, 0.55, 0.7, 0.75}) {
    double prev = 1e300;
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
      const auto q = cf::exact_tv_bound(H, n);
      EXPECT_GE(q.tv_bound, 0.0);
      EXPECT_LT(q.tv_bound, prev) << "H=" << H << " n=" << n;
      EXPECT_NEAR(q.fourth_cumulant / (q.var_exact * q.var_exact) / 6.0 * 4.0, q.tv_bound * q.tv_bound, 1e-12);
      prev = q.tv_bound;
    }
  }
}

TEST(RateRegression, GridValidationAndSmallGridSlopes) {
  EXPECT_THROW(cf::rate_regression(0.55, {16, 32, 64, 128}), cf::DomainError);
  EXPECT_THROW(cf::rate_regression(0.55, {16, 32, 64, 100, 256}), cf::DomainError);
  const auto fit = cf::rate_regression(0.5, {16, 32, 64, 128, 256});
  EXPECT_NEAR(fit.slope, -0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(2.0 * std::sqrt(2.0)), 1e-12);
  EXPECT_LT(fit.residual, 1e-12);
  const auto crit = cf::rate_regression(0.75, {16, 32, 64, 128, 256});
  EXPECT_GT(crit.slope, 0.0);
  EXPECT_EQ(crit.intercept, 0.0);
}

TEST(SecondChaosRepresentation, SmallNMomentsThroughCholeskyCoordinates) {
  for (double H : {0.3, 0.5, 0.7, 0.75}) {
    for (std::size_t n = 2; n <= 6; ++n) {
      const auto q = cf::exact_tv_bound(H, n);
      double s2 = 0.0, s4 = 0.0;
      for (double l : q.eigenvalues) {
        s2 += l * l;
        s4 += l * l * l * l;
      }
      const double e4_eigen = 48.0 * s4 + 3.0 * (2.0 * s2) * (2.0 * s2);

      // Explicit increments X = L·N with L L^T = Σ_n, written as a polynomial in N.
      const auto model = cf::build_model(H, n);
      const Eigen::MatrixXd L = model.covariance.llt().matrixL();
      const double scale = cf::normalization(H, n, cf::sigma_for(H));
      cf::Polynomial stat = cf::Polynomial::constant(n, -static_cast<double>(n));
      for (std::size_t k = 0; k < n; ++k) {
        cf::Polynomial xk(n);
        for (std::size_t j = 0; j <= k; ++j)
          xk += cf::Polynomial::variable(n, j) * L(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        stat += xk * xk;
      }
      stat *= 1.0 / scale;
      EXPECT_NEAR(cf::gaussian_expectation(stat.pow(4)), e4_eigen, 1e-8 * std::max(1.0, e4_eigen));

      const auto F = cf::quadratic_variation_chaos(H, n);
      EXPECT_NEAR(cf::moment(F, 4), e4_eigen, 1e-8 * std::max(1.0, e4_eigen));
      const auto Fc = cf::from_polynomial(stat);
      EXPECT_NEAR(cf::second_moment(Fc), q.var_exact, 1e-10);

      // k = 2 equality: Var⟨DF, −DL⁻¹F⟩ = (E F⁴ − 3(E F²)²)/6.
      const double var_t = cf::variance(cf::stein_kernel_term(F));
      const double cum = cf::moment(F, 4) - 3.0 * cf::second_moment(F) * cf::second_moment(F);
      EXPECT_NEAR(var_t, cum / 6.0, 1e-10 * std::max(1.0, var_t));
    }
  }
}

TEST(SecondChaosRepresentation, UnitVarianceAtHalf) {
  for (std::size_t n : {2u, 5u, 40u, 300u})
    EXPECT_NEAR(cf::quadratic_variation_variance(0.5, n) / (2.0 * n), 1.0, 1e-15);
}

TEST(MonteCarlo, SandwichAndDeterminism) {
  const auto a = cf::monte_carlo_distance(0.5, 128, 20000, 42);
  EXPECT_TRUE(a.pass);
  EXPECT_LE(a.distances.kolmogorov, 2.0 * std::sqrt(2.0 / 128) + 3.0 * cf::dkw_error(20000));
  const auto b = cf::monte_carlo_distance(0.5, 128, 20000, 42);
  EXPECT_EQ(a.distances.kolmogorov, b.distances.kolmogorov);
  const auto c = cf::monte_carlo_distance(0.5, 128, 20000, 43);
  EXPECT_NE(a.distances.kolmogorov, c.distances.kolmogorov);

  const auto q = cf::exact_tv_bound(0.7, 64);
  const auto xs = cf::sample_quadratic_variation(q, 50000, 7);
  double m2 = 0.0;
  for (double x : xs) m2 += x * x;
  EXPECT_NEAR(m2 / xs.size(), 1.0, 0.05);
}
