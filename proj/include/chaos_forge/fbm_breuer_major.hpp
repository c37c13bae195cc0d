#pragma once

// Quadratic variation of fractional Brownian motion increments as a
// second-chaos element Σ λ_i(N_i² − 1): covariance model, Breuer–Major
// normalization, exact total-variation bound from the spectrum, rate fits and
// Monte Carlo distance estimates.

#include <chaos_forge/errors.hpp>
#include <chaos_forge/stein_normal.hpp>
#include <chaos_forge/symmetric_tensor.hpp>
#include <chaos_forge/wiener_chaos.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace chaos_forge {

inline void check_hurst(double H) {
  if (!(H > 0.0 && H < 1.0)) throw DomainError("Hurst parameter must lie in (0, 1)");
}

/// ρ_H(r) = ½(|r+1|^{2H} − 2|r|^{2H} + |r−1|^{2H}), free of cancellation for large r.
inline double fbm_autocovariance(double H, long r) {
  check_hurst(H);
  const double a = std::abs(static_cast<double>(r));
  if (a == 0.0) return 1.0;
  const double h2 = 2.0 * H;
  const double up = std::expm1(h2 * std::log1p(1.0 / a));
  const double down = a == 1.0 ? -1.0 : std::expm1(h2 * std::log1p(-1.0 / a));
  return 0.5 * std::pow(a, h2) * (up + down);
}

struct FbmIncrementModel {
  double H = 0.5;
  std::size_t n = 0;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd spectrum;  ///< eigenvalues of Σ_n, ascending
};

/// Σ_n with entries ρ_H(i − j) and its spectrum; rejects a covariance that is not PSD.
inline FbmIncrementModel build_model(double H, std::size_t n) {
  check_hurst(H);
  if (n < 2) throw DomainError("build_model: n must be at least 2");
  FbmIncrementModel m;
  m.H = H;
  m.n = n;
  std::vector<double> rho(n);
  for (std::size_t r = 0; r < n; ++r) rho[r] = fbm_autocovariance(H, static_cast<long>(r));
  m.covariance.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho[i > j ? i - j : j - i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.covariance, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw ConvergenceError("build_model: eigensolver failed");
  m.spectrum = eig.eigenvalues();
  if (m.spectrum.minCoeff() < -1e-8 * static_cast<double>(n))
    throw InvariantViolation("build_model: covariance is not positive semidefinite");
  return m;
}

/// σ_H² = 2Σ_{r∈Z} ρ_H(r)², summed to R with an integral tail c²(R+½)^{4H−3}/(3−4H), c = H(2H−1).
inline double breuer_major_sigma_squared(double H, std::size_t R = 10000) {
  check_hurst(H);
  if (H >= 0.75) throw ConvergenceError("breuer_major_sigma: the series diverges for H >= 3/4");
  if (R < 1000) throw DomainError("breuer_major_sigma: truncation must be at least 1000");
  auto partial = [H](std::size_t R_) {
    double sum = 0.0;
    for (std::size_t r = R_; r >= 1; --r) {
      const double rho = fbm_autocovariance(H, static_cast<long>(r));
      sum += rho * rho;
    }
    const double c = H * (2.0 * H - 1.0);
    const double tail = c * c * std::pow(static_cast<double>(R_) + 0.5, 4.0 * H - 3.0) / (3.0 - 4.0 * H);
    return 2.0 * (1.0 + 2.0 * (sum + tail));
  };
  const double s1 = partial(R);
  const double s2 = partial(2 * R);
  if (std::abs(s1 - s2) > 1e-6 * s2)
    throw ConvergenceError("breuer_major_sigma: truncation " + std::to_string(R) + " is not stable to 1e-6");
  return s2;
}

inline double breuer_major_sigma(double H, std::size_t R = 10000) { return std::sqrt(breuer_major_sigma_squared(H, R)); }

/// Var(Σ_{k<n}(X_k² − 1)) = 2n·Σ_{|r|<n}(1 − |r|/n)ρ_H(r)².
inline double quadratic_variation_variance(double H, std::size_t n) {
  check_hurst(H);
  double sum = 1.0;
  for (std::size_t r = 1; r < n; ++r) {
    const double rho = fbm_autocovariance(H, static_cast<long>(r));
    sum += 2.0 * (1.0 - static_cast<double>(r) / static_cast<double>(n)) * rho * rho;
  }
  return 2.0 * static_cast<double>(n) * sum;
}

struct CriticalSigmaFit {
  double sigma_squared = 0.0;  ///< slope of Var/n against log n
  double intercept = 0.0;
};

/// At H = 3/4, Var/n ≈ a + σ²·log n; σ² is the least-squares slope on the grid.
inline CriticalSigmaFit critical_sigma_fit(const std::vector<std::size_t>& n_grid) {
  if (n_grid.size() < 2) throw DomainError("critical_sigma_fit: need at least two grid points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t n : n_grid) {
    const double x = std::log(static_cast<double>(n));
    const double y = quadratic_variation_variance(0.75, n) / static_cast<double>(n);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(n_grid.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {slope, (sy - slope * sx) / m};
}

inline const std::vector<std::size_t>& default_n_grid() {
  static const std::vector<std::size_t> grid{128, 256, 512, 1024, 2048};
  return grid;
}

struct QuadraticVariationStatistic {
  double H = 0.5;
  std::size_t n = 0;
  double sigma = 0.0;
  std::vector<double> eigenvalues;  ///< of A_n = Σ_n / (σ√n), or σ√(n log n) at H = 3/4
  double var_exact = 0.0;           ///< 2Σλ_i²
  double fourth_cumulant = 0.0;     ///< 48Σλ_i⁴
  double tv_bound = 0.0;            ///< 2√(8Σλ̂_i⁴) after rescaling to unit variance
};

inline double normalization(double H, std::size_t n, double sigma) {
  const double nn = static_cast<double>(n);
  return H == 0.75 ? sigma * std::sqrt(nn * std::log(nn)) : sigma * std::sqrt(nn);
}

inline double sigma_for(double H) {
  if (H == 0.75) return std::sqrt(critical_sigma_fit(default_n_grid()).sigma_squared);
  return breuer_major_sigma(H);
}

inline QuadraticVariationStatistic quadratic_variation_statistic(const FbmIncrementModel& model) {
  if (model.H > 0.75) throw DomainError("quadratic_variation_statistic: H must not exceed 3/4");
  QuadraticVariationStatistic q;
  q.H = model.H;
  q.n = model.n;
  q.sigma = sigma_for(model.H);
  const double scale = normalization(model.H, model.n, q.sigma);
  double s2 = 0.0, s4 = 0.0;
  for (Eigen::Index i = 0; i < model.spectrum.size(); ++i) {
    const double l = model.spectrum(i) / scale;
    q.eigenvalues.push_back(l);
    s2 += l * l;
    s4 += l * l * l * l;
  }
  q.var_exact = 2.0 * s2;
  q.fourth_cumulant = 48.0 * s4;
  // Rescaled λ̂ = λ/√var, so Σλ̂⁴ = s4/var².
  q.tv_bound = 2.0 * std::sqrt(8.0 * s4 / (q.var_exact * q.var_exact));
  return q;
}

inline QuadraticVariationStatistic exact_tv_bound(double H, std::size_t n) {
  check_hurst(H);
  if (H > 0.75) throw DomainError("exact_tv_bound: H must not exceed 3/4");
  return quadratic_variation_statistic(build_model(H, n));
}

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< root-mean-square residual of the fit
  std::vector<double> tv_bounds;
};

inline void check_rate_grid(const std::vector<std::size_t>& n_grid) {
  if (n_grid.size() < 5) throw DomainError("rate_regression: grid needs at least 5 points");
  const double ratio = static_cast<double>(n_grid[1]) / static_cast<double>(n_grid[0]);
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (!(ratio > 1.0) ||
        std::abs(static_cast<double>(n_grid[i]) / static_cast<double>(n_grid[i - 1]) - ratio) > 1e-9 * ratio)
      throw DomainError("rate_regression: grid must be geometric and increasing");
}

/// Fits log tv against log n, or tv against 1/log n through the origin at H = 3/4.
inline RateFit fit_rate(double H, const std::vector<std::size_t>& n_grid, const std::vector<double>& tv_bounds) {
  check_rate_grid(n_grid);
  if (tv_bounds.size() != n_grid.size()) throw DomainError("fit_rate: one bound per grid point required");
  RateFit fit;
  fit.tv_bounds = tv_bounds;
  const double m = static_cast<double>(n_grid.size());
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const double ln = std::log(static_cast<double>(n_grid[i]));
    xs.push_back(H == 0.75 ? 1.0 / ln : ln);
    ys.push_back(H == 0.75 ? tv_bounds[i] : std::log(tv_bounds[i]));
  }
  if (H == 0.75) {
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += xs[i] * ys[i];
      sxx += xs[i] * xs[i];
    }
    fit.slope = sxy / sxx;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

inline RateFit rate_regression(double H, const std::vector<std::size_t>& n_grid) {
  check_rate_grid(n_grid);
  std::vector<double> tvs;
  for (std::size_t n : n_grid) tvs.push_back(exact_tv_bound(H, n).tv_bound);
  return fit_rate(H, n_grid, tvs);
}

/// Draws of the unit-variance statistic Σλ̂_i(N_i² − 1) from a deterministic substream.
inline std::vector<double> sample_quadratic_variation(const QuadraticVariationStatistic& q, std::size_t samples,
                                                      std::uint64_t seed, std::uint64_t stream = 0) {
  if (samples == 0) throw DomainError("sample_quadratic_variation: need at least one sample");
  const double unit = 1.0 / std::sqrt(q.var_exact);
  std::vector<double> lam;
  for (double l : q.eigenvalues) lam.push_back(l * unit);
  auto rng = make_engine(seed, stream);
  std::normal_distribution<double> normal;
  std::vector<double> out(samples);
  for (double& v : out) {
    double s = 0.0;
    for (double l : lam) {
      const double z = normal(rng);
      s += l * (z * z - 1.0);
    }
    v = s;
  }
  return out;
}

struct MonteCarloResult {
  DistanceReport distances;
  double margin = 0.0;  ///< tv_bound + 3·DKW − d_K
  bool pass = false;
};

/// d_K of sampled F_{n,H} against N(0,1), compared with the exact TV bound plus 3·DKW.
inline MonteCarloResult monte_carlo_distance(double H, std::size_t n, std::size_t samples, std::uint64_t seed,
                                             std::uint64_t stream = 0) {
  const auto q = exact_tv_bound(H, n);
  const auto xs = sample_quadratic_variation(q, samples, seed, stream);
  MonteCarloResult r;
  r.distances = distance_report(xs, q.tv_bound);
  r.margin = q.tv_bound + 3.0 * r.distances.monte_carlo_error - r.distances.kolmogorov;
  r.pass = r.margin >= 0.0;
  return r;
}

/// F_{n,H} = I₂(Σ_n/(σ√n)) over n i.i.d. coordinates, using the symmetric square root of Σ_n.
inline ChaosElement quadratic_variation_chaos(double H, std::size_t n) {
  const auto model = build_model(H, n);
  const double scale = normalization(H, n, sigma_for(H));
  SymmetricKernel f(n, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      f.add({static_cast<int>(i), static_cast<int>(j)},
            model.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / scale);
  return multiple_integral(f);
}

}  // namespace chaos_forge
