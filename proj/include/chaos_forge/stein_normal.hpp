#pragma once

// One-dimensional Stein equation f′(w) − w·f(w) = h(w) − E h(Z): the bounded
// solution, bound certificates, and empirical distances to N(0,1).

#include <chaos_forge/errors.hpp>
#include <chaos_forge/malliavin_ops.hpp>
#include <chaos_forge/wiener_chaos.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chaos_forge {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

enum class TestClass { bounded, absolutely_continuous, indicator };

inline const char* to_string(TestClass c) {
  switch (c) {
    case TestClass::bounded: return "bounded";
    case TestClass::absolutely_continuous: return "absolutely-continuous";
    case TestClass::indicator: return "indicator";
  }
  return "?";
}

/// A piecewise-smooth test function with its declared class.
/// `breakpoints` lists every point where h or h′ fails to be smooth.
struct TestFunction {
  std::string name;
  TestClass cls = TestClass::bounded;
  std::function<double(double)> h;
  std::function<double(double)> dh;
  double sup_abs = std::numeric_limits<double>::infinity();
  double sup_abs_derivative = std::numeric_limits<double>::infinity();
  std::vector<double> breakpoints;
  std::optional<double> threshold;
};

/// h = 1_{(−∞, x]}.
inline TestFunction indicator_at(double x) {
  TestFunction t;
  t.name = "indicator(" + std::to_string(x) + ")";
  t.cls = TestClass::indicator;
  t.h = [x](double w) { return w <= x ? 1.0 : 0.0; };
  t.sup_abs = 1.0;
  t.breakpoints = {x};
  t.threshold = x;
  return t;
}

namespace detail {

inline constexpr double kQuadratureTolerance = 1e-10;
inline constexpr double kTailCutoff = 40.0;

inline std::string format_error(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", e);
  return buf;
}

/// ∫_a^b f, split at the interior points of `cuts`.
inline double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                  std::vector<double> cuts) {
  std::vector<double> knots{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts)
    if (c > a && c < b && c > knots.back()) knots.push_back(c);
  knots.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    double error = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, knots[i], knots[i + 1], 15, 1e-11, &error);
    if (!std::isfinite(v) || !(error <= kQuadratureTolerance))
      throw ConvergenceError("quadrature on [" + std::to_string(knots[i]) + ", " + std::to_string(knots[i + 1]) +
                             "] did not converge (error estimate " + format_error(error) + ")");
    total += v;
  }
  return total;
}

}  // namespace detail

/// The bounded solution f_h of the Stein equation for a fixed test function.
class SteinSolution {
 public:
  explicit SteinSolution(TestFunction h) : h_(std::move(h)) {
    if (!h_.h) throw DomainError("SteinSolution: test function has no callable");
    if (h_.cls == TestClass::absolutely_continuous && !h_.dh)
      throw DomainError("SteinSolution: absolutely-continuous class requires h′");
    if (h_.cls == TestClass::indicator && !h_.threshold)
      throw DomainError("SteinSolution: indicator class requires a threshold");
    const auto& fn = h_.h;
    mean_ = detail::integrate_piecewise([&fn](double t) { return fn(t) * normal_pdf(t); }, -detail::kTailCutoff,
                                        detail::kTailCutoff, h_.breakpoints);
  }

  [[nodiscard]] const TestFunction& test_function() const noexcept { return h_; }

  /// E h(Z).
  [[nodiscard]] double expected_h() const noexcept { return mean_; }

  /// f_h(w) via the tail form on the side of w that keeps the exponent nonpositive.
  [[nodiscard]] double value(double w) const {
    const double s_max = detail::kTailCutoff;
    std::vector<double> cuts{std::min(s_max, 8.0 / (1.0 + std::abs(w)))};
    if (w <= 0.0) {
      for (double b : h_.breakpoints) cuts.push_back(w - b);
      return detail::integrate_piecewise(
          [&](double s) { return (h_.h(w - s) - mean_) * std::exp(w * s - 0.5 * s * s); }, 0.0, s_max, cuts);
    }
    for (double b : h_.breakpoints) cuts.push_back(b - w);
    return -detail::integrate_piecewise(
        [&](double s) { return (h_.h(w + s) - mean_) * std::exp(-w * s - 0.5 * s * s); }, 0.0, s_max, cuts);
  }

  /// f_h′(w) = w·f_h(w) + h(w) − E h(Z).
  [[nodiscard]] double derivative(double w) const { return w * value(w) + h_.h(w) - mean_; }

  /// f_h″(w) = f_h(w) + w·f_h′(w) + h′(w), absolutely-continuous class only.
  [[nodiscard]] double second_derivative(double w) const {
    if (!h_.dh) throw DomainError("SteinSolution: f″ requires h′");
    const double f = value(w);
    return f + w * (w * f + h_.h(w) - mean_) + h_.dh(w);
  }

  /// f′ − w·f − h + E h with f′ from a five-point difference of f.
  [[nodiscard]] double residual(double w, double step = 1e-3) const {
    const double fd = (value(w - 2 * step) - 8 * value(w - step) + 8 * value(w + step) - value(w + 2 * step)) /
                      (12.0 * step);
    return fd - w * value(w) - h_.h(w) + mean_;
  }

 private:
  TestFunction h_;
  double mean_ = 0.0;
};

inline double solve_stein(const TestFunction& h, double w) { return SteinSolution(h).value(w); }

/// √(2π)·e^{w²/2}·Φ(min(w,x))·(1 − Φ(max(w,x))) for h = 1_{(−∞,x]}.
inline double indicator_solution_closed_form(double x, double w) {
  const double lo = std::min(w, x);
  const double hi = std::max(w, x);
  return std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * w * w) * normal_cdf(lo) * normal_cdf(-hi);
}

struct BoundCheck {
  std::string bound;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct SteinCertificate {
  std::string function;
  TestClass cls = TestClass::bounded;
  std::vector<BoundCheck> checks;

  [[nodiscard]] bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
  }
  [[nodiscard]] double min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) m = std::min(m, c.margin);
    return m;
  }
};

struct GridSpec {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t points = 2001;
  double slack = 1e-6;
};

/// Evaluates the listed sup-norm bounds for the declared class on a uniform grid.
inline SteinCertificate verify_solution_bounds(const SteinSolution& sol, const GridSpec& grid = {}) {
  if (grid.points < 2 || !(grid.hi > grid.lo)) throw DomainError("verify_solution_bounds: degenerate grid");
  const TestFunction& t = sol.test_function();
  SteinCertificate cert{t.name, t.cls, {}};
  auto check = [&](std::string name, double lhs, double rhs) {
    cert.checks.push_back({std::move(name), lhs, rhs, rhs - lhs, rhs - lhs >= -grid.slack});
  };

  double sup_f = 0.0, sup_fp = 0.0, sup_fpp = 0.0, sup_wf = 0.0, sup_h = 0.0, sup_dh = 0.0;
  double min_f = std::numeric_limits<double>::infinity();
  double min_fp = std::numeric_limits<double>::infinity();
  double max_fp = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double w = grid.lo + (grid.hi - grid.lo) * static_cast<double>(i) / static_cast<double>(grid.points - 1);
    const double f = sol.value(w);
    const double hw = t.h(w);
    const double fp = w * f + hw - sol.expected_h();
    sup_h = std::max(sup_h, std::abs(hw));
    sup_f = std::max(sup_f, std::abs(f));
    sup_fp = std::max(sup_fp, std::abs(fp));
    sup_wf = std::max(sup_wf, std::abs(w * f));
    min_f = std::min(min_f, f);
    if (!(t.threshold && w == *t.threshold)) {
      min_fp = std::min(min_fp, fp);
      max_fp = std::max(max_fp, fp);
    }
    if (t.dh) {
      const double dh = t.dh(w);
      sup_dh = std::max(sup_dh, std::abs(dh));
      sup_fpp = std::max(sup_fpp, std::abs(f + w * fp + dh));
    }
  }

  switch (t.cls) {
    case TestClass::bounded: {
      if (sup_h > t.sup_abs + 1e-12) throw DomainError("verify_solution_bounds: declared ‖h‖ is below its grid maximum");
      check("|f| <= sqrt(2pi)|h|", sup_f, std::sqrt(2.0 * std::numbers::pi) * t.sup_abs);
      check("|f'| <= 4|h|", sup_fp, 4.0 * t.sup_abs);
      break;
    }
    case TestClass::absolutely_continuous: {
      if (sup_dh > t.sup_abs_derivative + 1e-12)
        throw DomainError("verify_solution_bounds: declared ‖h′‖ is below its grid maximum");
      check("|f| <= 2|h'|", sup_f, 2.0 * t.sup_abs_derivative);
      check("|f'| <= sqrt(2/pi)|h'|", sup_fp, std::sqrt(2.0 / std::numbers::pi) * t.sup_abs_derivative);
      check("|f''| <= 2|h'|", sup_fpp, 2.0 * t.sup_abs_derivative);
      break;
    }
    case TestClass::indicator: {
      check("0 <= f", -min_f, 0.0);
      check("f <= sqrt(2pi)/4", sup_f, std::sqrt(2.0 * std::numbers::pi) / 4.0);
      check("|wf| <= 1", sup_wf, 1.0);
      check("|f'| <= 1", sup_fp, 1.0);
      check("|f'(w) - f'(v)| <= 1", max_fp - min_fp, 1.0);
      break;
    }
  }
  return cert;
}

/// Ten test functions of the requested class.
inline std::vector<TestFunction> shipped_test_functions(TestClass cls) {
  std::vector<TestFunction> out;
  auto bounded = [&](std::string name, std::function<double(double)> h, double sup, std::vector<double> bp = {}) {
    TestFunction t;
    t.name = std::move(name);
    t.cls = TestClass::bounded;
    t.h = std::move(h);
    t.sup_abs = sup;
    t.breakpoints = std::move(bp);
    out.push_back(std::move(t));
  };
  auto ac = [&](std::string name, std::function<double(double)> h, std::function<double(double)> dh, double sup_dh,
                std::vector<double> bp = {}) {
    TestFunction t;
    t.name = std::move(name);
    t.cls = TestClass::absolutely_continuous;
    t.h = std::move(h);
    t.dh = std::move(dh);
    t.sup_abs_derivative = sup_dh;
    t.breakpoints = std::move(bp);
    out.push_back(std::move(t));
  };

  switch (cls) {
    case TestClass::bounded:
      bounded("sign", [](double w) { return w > 0 ? 1.0 : (w < 0 ? -1.0 : 0.0); }, 1.0, {0.0});
      bounded("sin(5w)", [](double w) { return std::sin(5 * w); }, 1.0);
      bounded("cos", [](double w) { return std::cos(w); }, 1.0);
      bounded("tanh(3w)", [](double w) { return std::tanh(3 * w); }, 1.0);
      bounded("1[-1,1]", [](double w) { return std::abs(w) <= 1 ? 1.0 : 0.0; }, 1.0, {-1.0, 1.0});
      bounded("2*1(w>0.5)-1", [](double w) { return w > 0.5 ? 1.0 : -1.0; }, 1.0, {0.5});
      bounded("cos(w)exp(-w^2)", [](double w) { return std::cos(w) * std::exp(-w * w); }, 1.0);
      bounded("(2/pi)atan(w)", [](double w) { return 2.0 / std::numbers::pi * std::atan(w); }, 1.0);
      bounded("1[0,2]-1[-3,-1]",
              [](double w) { return (w >= 0 && w <= 2 ? 1.0 : 0.0) - (w >= -3 && w <= -1 ? 1.0 : 0.0); }, 1.0,
              {-3.0, -1.0, 0.0, 2.0});
      bounded("3sin(w)cos(2w)", [](double w) { return 3 * std::sin(w) * std::cos(2 * w); }, 3.0);
      break;
    case TestClass::absolutely_continuous:
      ac("sin", [](double w) { return std::sin(w); }, [](double w) { return std::cos(w); }, 1.0);
      ac("cos(2w)", [](double w) { return std::cos(2 * w); }, [](double w) { return -2 * std::sin(2 * w); }, 2.0);
      ac("atan", [](double w) { return std::atan(w); }, [](double w) { return 1.0 / (1 + w * w); }, 1.0);
      ac("tanh", [](double w) { return std::tanh(w); },
         [](double w) { return 1.0 / (std::cosh(w) * std::cosh(w)); }, 1.0);
      ac("identity", [](double w) { return w; }, [](double) { return 1.0; }, 1.0);
      ac("abs", [](double w) { return std::abs(w); }, [](double w) { return w < 0 ? -1.0 : 1.0; }, 1.0, {0.0});
      ac("softplus", [](double w) { return w > 0 ? w + std::log1p(std::exp(-w)) : std::log1p(std::exp(w)); },
         [](double w) { return 1.0 / (1.0 + std::exp(-w)); }, 1.0);
      ac("clamp(w,-1,1)", [](double w) { return std::clamp(w, -1.0, 1.0); },
         [](double w) { return std::abs(w) < 1 ? 1.0 : 0.0; }, 1.0, {-1.0, 1.0});
      ac("exp(-w^2)", [](double w) { return std::exp(-w * w); },
         [](double w) { return -2 * w * std::exp(-w * w); }, std::sqrt(2.0 / std::numbers::e));
      ac("Phi", [](double w) { return normal_cdf(w); }, [](double w) { return normal_pdf(w); },
         1.0 / std::sqrt(2.0 * std::numbers::pi));
      break;
    case TestClass::indicator:
      for (double x : {-3.0, -2.0, -1.3, -0.5, 0.0, 0.4, 1.0, 1.3, 2.0, 3.5}) out.push_back(indicator_at(x));
      break;
  }
  return out;
}

/// sup_x |F_n(x) − Φ(x)|, attained at a sample point or its left limit.
inline double kolmogorov_distance(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("kolmogorov_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double phi = normal_cdf(samples[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - phi), std::abs(static_cast<double>(i) / n - phi)});
  }
  return d;
}

namespace detail {

/// ∫_a^b Φ.
inline double integral_of_cdf(double a, double b) {
  auto g = [](double x) { return x * normal_cdf(x) + normal_pdf(x); };
  return g(b) - g(a);
}

/// ∫_a^b |c − Φ| for a ≤ b.
inline double abs_gap_integral(double c, double a, double b) {
  if (!(b > a)) return 0.0;
  if (c <= 0.0) return integral_of_cdf(a, b);
  if (c >= 1.0) return (b - a) - integral_of_cdf(a, b);
  const double cross = std::clamp(normal_quantile(c), a, b);
  return (c * (cross - a) - integral_of_cdf(a, cross)) + (integral_of_cdf(cross, b) - c * (b - cross));
}

}  // namespace detail

/// ∫|F_n − Φ| computed exactly piece by piece.
inline double wasserstein_distance(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("wasserstein_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const double first = samples.front();
  const double last = samples.back();
  double total = first * normal_cdf(first) + normal_pdf(first);  // ∫_{−∞}^{x₁} Φ
  total += normal_pdf(last) - last * normal_cdf(-last);           // ∫_{x_n}^{∞} (1 − Φ)
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    total += detail::abs_gap_integral(static_cast<double>(i + 1) / n, samples[i], samples[i + 1]);
  return total;
}

/// Dvoretzky–Kiefer–Wolfowitz radius sup|F_n − F| ≤ ε at confidence 1 − α.
inline double dkw_error(std::size_t n, double alpha = 0.05) {
  if (n == 0) throw DomainError("dkw_error: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("dkw_error: alpha must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

/// Lower companion to d_TV: the larger of d_K and ½Σ|p̂_j − q_j| over ⌈n^{1/3}⌉
/// cells of equal standard-normal mass.
inline double empirical_tv_surrogate(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("empirical_tv_surrogate: empty sample");
  const std::size_t n = samples.size();
  const auto cells = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n))));
  std::vector<double> counts(cells, 0.0);
  for (double x : samples) {
    const auto j = static_cast<std::size_t>(normal_cdf(x) * static_cast<double>(cells));
    counts[std::min(j, cells - 1)] += 1.0;
  }
  double tv = 0.0;
  for (double c : counts) tv += std::abs(c / static_cast<double>(n) - 1.0 / static_cast<double>(cells));
  return std::max(0.5 * tv, kolmogorov_distance(std::move(samples)));
}

struct DistanceReport {
  double kolmogorov = 0.0;
  double wasserstein = 0.0;
  double tv_upper_bound = 0.0;
  double monte_carlo_error = 0.0;
  std::size_t sample_size = 0;
};

inline DistanceReport distance_report(const std::vector<double>& samples, double tv_upper_bound) {
  if (!(tv_upper_bound >= 0.0)) throw DomainError("distance_report: negative TV bound");
  return {kolmogorov_distance(samples), wasserstein_distance(samples), tv_upper_bound, dkw_error(samples.size()),
          samples.size()};
}

/// (3Σγ_i, 4.1Σγ_i) for independent summands with Σσ_i² = 1.
inline std::pair<double, double> clt_bound_independent_sum(const std::vector<double>& third_abs_moments,
                                                           const std::vector<double>& variances) {
  if (third_abs_moments.empty()) throw DomainError("clt_bound_independent_sum: no summands");
  if (third_abs_moments.size() != variances.size())
    throw DomainError("clt_bound_independent_sum: moment and variance lists differ in length");
  double var = 0.0, gamma = 0.0;
  for (std::size_t i = 0; i < variances.size(); ++i) {
    if (variances[i] < 0.0 || third_abs_moments[i] < 0.0)
      throw DomainError("clt_bound_independent_sum: negative moment");
    var += variances[i];
    gamma += third_abs_moments[i];
  }
  if (std::abs(var - 1.0) > 1e-9) throw NormalizationError("clt_bound_independent_sum: variances must sum to 1");
  return {3.0 * gamma, 4.1 * gamma};
}

inline void check_standardized(const ChaosElement& f, const char* who) {
  if (std::abs(expectation(f)) > 1e-9) throw NormalizationError(std::string(who) + ": E F must be 0");
  if (std::abs(second_moment(f) - 1.0) > 1e-9) throw NormalizationError(std::string(who) + ": E F² must be 1");
}

/// 2·√Var⟨DF, −DL⁻¹F⟩_H, computed exactly from the chaos expansion.
inline double malliavin_stein_tv_bound(const ChaosElement& f) {
  check_standardized(f, "malliavin_stein_tv_bound");
  return 2.0 * std::sqrt(std::max(0.0, variance(stein_kernel_term(f))));
}

}  // namespace chaos_forge
