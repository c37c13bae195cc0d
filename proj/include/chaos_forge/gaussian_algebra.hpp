#pragma once

// Exact polynomial algebra over independent coordinates, Hermite and Laguerre
// tables, and the moment oracles (Gaussian and Gamma product measures).

#include <chaos_forge/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chaos_forge {

/// Exponent vector (p₁,…,p_d) of a monomial.
using MultiIndex = std::vector<int>;

inline constexpr int kPolynomialDegreeCap = 32;

inline int total_degree(const MultiIndex& m) { return std::accumulate(m.begin(), m.end(), 0); }

/// Multivariate polynomial with real coefficients in d variables.
///
/// Terms are keyed by exponent multi-index; zero coefficients are never stored.
/// The same representation serves Gaussian coordinates (oracle for E[·] under
/// N(0, Id)) and Gamma coordinates (Laguerre structure).
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, double>;

  explicit Polynomial(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw DomainError("Polynomial: dimension must be positive");
  }

  static Polynomial constant(std::size_t dimension, double c) {
    Polynomial p(dimension);
    p.add_term(MultiIndex(dimension, 0), c);
    return p;
  }

  /// The coordinate x_i (0-based i).
  static Polynomial variable(std::size_t dimension, std::size_t i) {
    if (i >= dimension) throw RangeError("Polynomial::variable: index out of range");
    MultiIndex m(dimension, 0);
    m[i] = 1;
    Polynomial p(dimension);
    p.add_term(std::move(m), 1.0);
    return p;
  }

  /// Univariate polynomial Σ coeffs[j]·x_i^j embedded in d variables.
  static Polynomial univariate(std::size_t dimension, std::size_t i, std::span<const double> coeffs) {
    if (i >= dimension) throw RangeError("Polynomial::univariate: index out of range");
    Polynomial p(dimension);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      MultiIndex m(dimension, 0);
      m[i] = static_cast<int>(j);
      p.add_term(std::move(m), coeffs[j]);
    }
    return p;
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
  [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }

  /// Total degree; 0 for the zero polynomial.
  [[nodiscard]] int degree() const {
    int deg = 0;
    for (const auto& [m, c] : terms_) deg = std::max(deg, total_degree(m));
    return deg;
  }

  [[nodiscard]] double coefficient(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
  }

  [[nodiscard]] double constant_term() const { return coefficient(MultiIndex(dimension_, 0)); }

  /// Accumulates c·x^m; drops the entry if the sum cancels to exactly zero.
  void add_term(MultiIndex m, double c) {
    if (m.size() != dimension_) throw RangeError("Polynomial::add_term: multi-index length mismatch");
    for (int e : m)
      if (e < 0) throw DomainError("Polynomial::add_term: negative exponent");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(m), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& other) {
    check_dimension(other);
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& other) {
    check_dimension(other);
    for (const auto& [m, c] : other.terms_) add_term(m, -c);
    return *this;
  }

  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dimension(b);
    if (!a.is_zero() && !b.is_zero() && a.degree() + b.degree() > kPolynomialDegreeCap)
      throw DegreeCapError("Polynomial product degree " + std::to_string(a.degree() + b.degree()) +
                           " exceeds cap " + std::to_string(kPolynomialDegreeCap));
    Polynomial out(a.dimension_);
    MultiIndex m(a.dimension_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
        out.add_term(m, ca * cb);
      }
    }
    return out;
  }

  Polynomial& operator*=(const Polynomial& other) { return *this = *this * other; }

  [[nodiscard]] Polynomial pow(int p) const {
    if (p < 0) throw DomainError("Polynomial::pow: negative exponent");
    Polynomial out = constant(dimension_, 1.0);
    for (int i = 0; i < p; ++i) out *= *this;
    return out;
  }

  /// ∂/∂x_i.
  [[nodiscard]] Polynomial derivative(std::size_t i) const {
    if (i >= dimension_) throw RangeError("Polynomial::derivative: index out of range");
    Polynomial out(dimension_);
    for (const auto& [m, c] : terms_) {
      if (m[i] == 0) continue;
      MultiIndex dm = m;
      dm[i] -= 1;
      out.add_term(std::move(dm), c * m[i]);
    }
    return out;
  }

  [[nodiscard]] double evaluate(std::span<const double> x) const {
    if (x.size() != dimension_) throw RangeError("Polynomial::evaluate: point dimension mismatch");
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
      double term = c;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (int e = 0; e < m[i]; ++e) term *= x[i];
      sum += term;
    }
    return sum;
  }

 private:
  void check_dimension(const Polynomial& other) const {
    if (other.dimension_ != dimension_) throw RangeError("Polynomial: dimension mismatch");
  }

  std::size_t dimension_;
  Terms terms_;
};

/// Largest absolute coefficient of (a − b).
inline double max_abs_difference(const Polynomial& a, const Polynomial& b) {
  double worst = 0.0;
  const Polynomial diff = a - b;
  for (const auto& [m, c] : diff.terms()) worst = std::max(worst, std::abs(c));
  return worst;
}

/// Realizations of X(e₁),…,X(e_d) are the coordinates of this polynomial.
using GaussianPolynomial = Polynomial;

// ---------------------------------------------------------------------------
// Hermite polynomials (probabilists' convention, leading coefficient 1)
// ---------------------------------------------------------------------------

/// H_k(x) via H_{k+1} = x·H_k − k·H_{k−1}.
inline double hermite_eval(int k, double x) {
  if (k < 0) throw DomainError("hermite_eval: order must be nonnegative");
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Integer monomial coefficients of H₀…H_K; rows[k][j] is the coefficient of x^j in H_k.
class HermiteTable {
 public:
  explicit HermiteTable(int max_order) : max_order_(max_order) {
    if (max_order < 0) throw DomainError("HermiteTable: order must be nonnegative");
    rows_.push_back({1});
    if (max_order >= 1) rows_.push_back({0, 1});
    for (int k = 1; k < max_order; ++k) {
      std::vector<std::int64_t> next(static_cast<std::size_t>(k) + 2, 0);
      const auto& hk = rows_[static_cast<std::size_t>(k)];
      const auto& hkm1 = rows_[static_cast<std::size_t>(k) - 1];
      for (std::size_t j = 0; j < hk.size(); ++j) next[j + 1] = hk[j];
      for (std::size_t j = 0; j < hkm1.size(); ++j) {
        std::int64_t scaled = 0;
        if (__builtin_mul_overflow(hkm1[j], static_cast<std::int64_t>(k), &scaled) ||
            __builtin_sub_overflow(next[j], scaled, &next[j]))
          throw OverflowError("HermiteTable: coefficient overflow at order " + std::to_string(k + 1));
      }
      rows_.push_back(std::move(next));
    }
  }

  [[nodiscard]] int max_order() const noexcept { return max_order_; }

  [[nodiscard]] const std::vector<std::int64_t>& row(int k) const {
    if (k < 0 || k > max_order_) throw RangeError("HermiteTable::row: order out of range");
    return rows_[static_cast<std::size_t>(k)];
  }

  [[nodiscard]] std::vector<double> row_as_double(int k) const {
    const auto& r = row(k);
    return {r.begin(), r.end()};
  }

 private:
  int max_order_;
  std::vector<std::vector<std::int64_t>> rows_;
};

/// H_k(x_i) as a polynomial in d variables.
inline Polynomial hermite_polynomial(std::size_t dimension, std::size_t i, int k) {
  const auto row = HermiteTable(k).row_as_double(k);
  return Polynomial::univariate(dimension, i, row);
}

// ---------------------------------------------------------------------------
// Laguerre polynomials L_n^{(ν)}
// ---------------------------------------------------------------------------

inline void check_laguerre_parameter(double nu) {
  if (!(nu > -1.0)) throw DomainError("Laguerre parameter must satisfy nu > -1");
}

/// L_n^{(ν)}(x) via (n+1)L_{n+1} = (2n+1+ν−x)L_n − (n+ν)L_{n−1}.
inline double laguerre_eval(int n, double nu, double x) {
  if (n < 0) throw DomainError("laguerre_eval: order must be nonnegative");
  check_laguerre_parameter(nu);
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = nu + 1.0 - x;
  for (int j = 1; j < n; ++j) {
    double next = ((2.0 * j + 1.0 + nu - x) * cur - (j + nu) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Monomial coefficients of L₀^{(ν)}…L_N^{(ν)}, built from the same three-term recurrence.
class LaguerreTable {
 public:
  LaguerreTable(int max_order, double nu) : max_order_(max_order), nu_(nu) {
    if (max_order < 0) throw DomainError("LaguerreTable: order must be nonnegative");
    check_laguerre_parameter(nu);
    rows_.push_back({1.0});
    if (max_order >= 1) rows_.push_back({nu + 1.0, -1.0});
    for (int j = 1; j < max_order; ++j) {
      const auto& lj = rows_[static_cast<std::size_t>(j)];
      const auto& ljm1 = rows_[static_cast<std::size_t>(j) - 1];
      std::vector<double> next(static_cast<std::size_t>(j) + 2, 0.0);
      for (std::size_t i = 0; i < lj.size(); ++i) {
        next[i] += (2.0 * j + 1.0 + nu) * lj[i];
        next[i + 1] -= lj[i];
      }
      for (std::size_t i = 0; i < ljm1.size(); ++i) next[i] -= (j + nu) * ljm1[i];
      for (double& c : next) c /= (j + 1.0);
      rows_.push_back(std::move(next));
    }
  }

  [[nodiscard]] int max_order() const noexcept { return max_order_; }
  [[nodiscard]] double nu() const noexcept { return nu_; }

  [[nodiscard]] const std::vector<double>& row(int n) const {
    if (n < 0 || n > max_order_) throw RangeError("LaguerreTable::row: order out of range");
    return rows_[static_cast<std::size_t>(n)];
  }

 private:
  int max_order_;
  double nu_;
  std::vector<std::vector<double>> rows_;
};

// ---------------------------------------------------------------------------
// Moment oracles
// ---------------------------------------------------------------------------

/// E[Z^p] for Z ~ N(0,1): (p−1)!! for even p, 0 for odd p.
inline double gaussian_moment(int p) {
  if (p < 0) throw DomainError("gaussian_moment: negative order");
  if (p % 2 == 1) return 0.0;
  double m = 1.0;
  for (int j = p - 1; j > 1; j -= 2) m *= j;
  if (!std::isfinite(m)) throw OverflowError("gaussian_moment: (p-1)!! overflows at p = " + std::to_string(p));
  return m;
}

/// E[P(Z₁,…,Z_d)] for i.i.d. standard Gaussians, term by term.
inline double gaussian_expectation(const Polynomial& p) {
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = c;
    for (int e : m) {
      if (e % 2 == 1) {
        term = 0.0;
        break;
      }
      term *= gaussian_moment(e);
    }
    sum += term;
  }
  return sum;
}

/// E[X^p] = a(a+1)…(a+p−1) for X ~ Gamma(shape a, scale 1).
inline double gamma_moment(int p, double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma_moment: shape must be positive");
  if (p < 0) throw DomainError("gamma_moment: negative order");
  double m = 1.0;
  for (int j = 0; j < p; ++j) m *= shape + j;
  if (!std::isfinite(m)) throw OverflowError("gamma_moment: moment overflows");
  return m;
}

/// E[P(X₁,…,X_d)] for i.i.d. Gamma(shape, 1) coordinates.
inline double gamma_expectation(const Polynomial& p, double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma_expectation: shape must be positive");
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = c;
    for (int e : m) term *= gamma_moment(e, shape);
    sum += term;
  }
  return sum;
}

}  // namespace chaos_forge
