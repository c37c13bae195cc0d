#pragma once

// Laguerre Dirichlet structure on (0,∞)^d with product Gamma(ν+1, 1) measure:
// L = Σ_i x_i∂_ii + (ν+1−x_i)∂_i, Γ[X,Y] = Σ_i x_i ∂_iX ∂_iY, and the
// product Laguerre basis ∏_j L^{(ν)}_{i_j}(x_j) as eigenbasis.

#include <chaos_forge/dirichlet_structure.hpp>
#include <chaos_forge/errors.hpp>
#include <chaos_forge/gaussian_algebra.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace chaos_forge {

/// Σ α(i)·∏_j L^{(ν)}_{i_j}(x_j), keyed by the multi-index i.
class LaguerreElement {
 public:
  using Coefficients = std::map<MultiIndex, double>;

  LaguerreElement(std::size_t dimension, double nu) : dimension_(dimension), nu_(nu) {
    if (dimension == 0) throw DomainError("LaguerreElement: dimension must be positive");
    check_laguerre_parameter(nu);
  }

  static LaguerreElement constant(std::size_t dimension, double nu, double c) {
    LaguerreElement e(dimension, nu);
    e.add_term(MultiIndex(dimension, 0), c);
    return e;
  }

  static LaguerreElement basis(std::size_t dimension, double nu, MultiIndex i) {
    LaguerreElement e(dimension, nu);
    e.add_term(std::move(i), 1.0);
    return e;
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] double nu() const noexcept { return nu_; }
  [[nodiscard]] const Coefficients& coefficients() const noexcept { return coeffs_; }
  [[nodiscard]] bool is_zero() const noexcept { return coeffs_.empty(); }

  [[nodiscard]] double coefficient(const MultiIndex& i) const {
    auto it = coeffs_.find(i);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  [[nodiscard]] int degree() const {
    int d = 0;
    for (const auto& [i, c] : coeffs_) d = std::max(d, total_degree(i));
    return d;
  }

  void add_term(MultiIndex i, double c) {
    if (i.size() != dimension_) throw RangeError("LaguerreElement::add_term: multi-index length mismatch");
    if (std::any_of(i.begin(), i.end(), [](int e) { return e < 0; }))
      throw RangeError("LaguerreElement::add_term: negative index");
    if (c == 0.0) return;
    auto [it, inserted] = coeffs_.try_emplace(std::move(i), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) coeffs_.erase(it);
    }
  }

  LaguerreElement& operator+=(const LaguerreElement& other) {
    check_compatible(other);
    for (const auto& [i, c] : other.coeffs_) add_term(i, c);
    return *this;
  }

  LaguerreElement& operator*=(double s) {
    if (s == 0.0) coeffs_.clear();
    for (auto& [i, c] : coeffs_) c *= s;
    return *this;
  }

  friend LaguerreElement operator+(LaguerreElement a, const LaguerreElement& b) { return a += b; }
  friend LaguerreElement operator-(LaguerreElement a, const LaguerreElement& b) { return a += b * -1.0; }
  friend LaguerreElement operator*(LaguerreElement a, double s) { return a *= s; }
  friend LaguerreElement operator*(double s, LaguerreElement a) { return a *= s; }

  void check_compatible(const LaguerreElement& other) const {
    if (other.dimension_ != dimension_) throw RangeError("LaguerreElement: dimension mismatch");
    if (other.nu_ != nu_) throw DomainError("LaguerreElement: Laguerre parameter mismatch");
  }

 private:
  std::size_t dimension_;
  double nu_;
  Coefficients coeffs_;
};

namespace detail {

/// x^m = Σ_{n ≤ m} T[m][n]·L_n^{(ν)}(x), by back-substitution against the monomial table.
inline std::vector<std::vector<double>> monomials_in_laguerre(int max_degree, double nu) {
  const LaguerreTable table(max_degree, nu);
  std::vector<std::vector<double>> out;
  for (int m = 0; m <= max_degree; ++m) {
    std::vector<double> residual(static_cast<std::size_t>(m) + 1, 0.0);
    residual.back() = 1.0;
    std::vector<double> coeffs(static_cast<std::size_t>(m) + 1, 0.0);
    for (int n = m; n >= 0; --n) {
      const auto& row = table.row(n);
      const double c = residual[static_cast<std::size_t>(n)] / row[static_cast<std::size_t>(n)];
      coeffs[static_cast<std::size_t>(n)] = c;
      for (std::size_t j = 0; j < row.size(); ++j) residual[j] -= c * row[j];
    }
    out.push_back(std::move(coeffs));
  }
  return out;
}

/// Drops coefficients below 1e−13 of the largest one; these are rounding residue of the basis change.
inline void drop_roundoff(LaguerreElement& e) {
  double scale = 0.0;
  for (const auto& [i, c] : e.coefficients()) scale = std::max(scale, std::abs(c));
  LaguerreElement cleaned(e.dimension(), e.nu());
  for (const auto& [i, c] : e.coefficients())
    if (std::abs(c) > 1e-13 * scale) cleaned.add_term(i, c);
  e = std::move(cleaned);
}

}  // namespace detail

/// Monomial expansion of a Laguerre-basis element.
inline Polynomial to_polynomial(const LaguerreElement& e) {
  const std::size_t d = e.dimension();
  const LaguerreTable table(std::max(e.degree(), 1), e.nu());
  Polynomial out(d);
  for (const auto& [i, c] : e.coefficients()) {
    Polynomial term = Polynomial::constant(d, c);
    for (std::size_t j = 0; j < d; ++j)
      if (i[j] > 0) term = term * Polynomial::univariate(d, j, table.row(i[j]));
    out += term;
  }
  return out;
}

/// Expansion of a polynomial in the product Laguerre basis with parameter ν.
inline LaguerreElement laguerre_from_polynomial(const Polynomial& p, double nu) {
  const std::size_t d = p.dimension();
  LaguerreElement out(d, nu);
  if (p.is_zero()) return out;
  int max_power = 0;
  for (const auto& [m, c] : p.terms())
    for (int e : m) max_power = std::max(max_power, e);
  const auto conv = detail::monomials_in_laguerre(max_power, nu);
  for (const auto& [m, c] : p.terms()) {
    std::map<MultiIndex, double> partial{{MultiIndex{}, c}};
    for (std::size_t j = 0; j < d; ++j) {
      std::map<MultiIndex, double> next;
      const auto& row = conv[static_cast<std::size_t>(m[j])];
      for (const auto& [prefix, v] : partial)
        for (std::size_t n = 0; n < row.size(); ++n) {
          if (row[n] == 0.0) continue;
          MultiIndex idx = prefix;
          idx.push_back(static_cast<int>(n));
          next[idx] += v * row[n];
        }
      partial = std::move(next);
    }
    for (const auto& [idx, v] : partial) out.add_term(idx, v);
  }
  detail::drop_roundoff(out);
  return out;
}

/// L φ = Σ_i x_i∂_iiφ + (ν+1−x_i)∂_iφ on a monomial expansion.
inline Polynomial laguerre_generator_monomial(const Polynomial& p, double nu) {
  const std::size_t d = p.dimension();
  Polynomial out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const Polynomial xi = Polynomial::variable(d, i);
    const Polynomial di = p.derivative(i);
    out += xi * di.derivative(i) + (Polynomial::constant(d, nu + 1.0) - xi) * di;
  }
  return out;
}

/// Σ_i x_i ∂_iX ∂_iY on monomial expansions.
inline Polynomial laguerre_gamma_monomial(const Polynomial& x, const Polynomial& y) {
  if (x.dimension() != y.dimension()) throw RangeError("laguerre_gamma_monomial: dimension mismatch");
  const std::size_t d = x.dimension();
  Polynomial out(d);
  for (std::size_t i = 0; i < d; ++i) out += Polynomial::variable(d, i) * x.derivative(i) * y.derivative(i);
  return out;
}

inline LaguerreElement laguerre_generator(const LaguerreElement& phi) {
  return laguerre_from_polynomial(laguerre_generator_monomial(to_polynomial(phi), phi.nu()), phi.nu());
}

inline LaguerreElement laguerre_multiply(const LaguerreElement& a, const LaguerreElement& b) {
  a.check_compatible(b);
  return laguerre_from_polynomial(to_polynomial(a) * to_polynomial(b), a.nu());
}

/// Γ[X,Y] by the closed form, checked against ½(L[XY] − Y·LX − X·LY).
inline LaguerreElement laguerre_gamma(const LaguerreElement& x, const LaguerreElement& y) {
  x.check_compatible(y);
  const double nu = x.nu();
  const Polynomial px = to_polynomial(x);
  const Polynomial py = to_polynomial(y);
  const Polynomial closed = laguerre_gamma_monomial(px, py);
  const Polynomial via_generator =
      (laguerre_generator_monomial(px * py, nu) - py * laguerre_generator_monomial(px, nu) -
       px * laguerre_generator_monomial(py, nu)) *
      0.5;
  double scale = 1.0;
  for (const auto& [m, c] : closed.terms()) scale = std::max(scale, std::abs(c));
  if (max_abs_difference(closed, via_generator) > 1e-10 * scale)
    throw InvariantViolation("laguerre_gamma: closed form and generator route disagree");
  return laguerre_from_polynomial(closed, nu);
}

/// Components in Ker(L + p·Id), grouped by total degree p.
inline std::map<int, LaguerreElement> eigen_project(const LaguerreElement& phi) {
  std::map<int, LaguerreElement> out;
  for (const auto& [i, c] : phi.coefficients()) {
    auto [it, inserted] = out.try_emplace(total_degree(i), phi.dimension(), phi.nu());
    it->second.add_term(i, c);
  }
  return out;
}

/// All multi-indices in d variables with total degree exactly p, lexicographic.
inline std::vector<MultiIndex> multi_indices_of_degree(std::size_t dimension, int p) {
  std::vector<MultiIndex> out;
  MultiIndex cur(dimension, 0);
  auto recurse = [&](auto&& self, std::size_t j, int left) -> void {
    if (j + 1 == dimension) {
      cur[j] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[j] = v;
      self(self, j + 1, left - v);
    }
  };
  recurse(recurse, 0, p);
  return out;
}

class LaguerreStructure {
 public:
  using Element = LaguerreElement;

  LaguerreStructure(std::size_t dimension, double nu) : dimension_(dimension), nu_(nu) {
    if (dimension == 0) throw DomainError("LaguerreStructure: dimension must be positive");
    check_laguerre_parameter(nu);
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] double nu() const noexcept { return nu_; }

  /// Expectation under the product Gamma(ν+1, 1) law.
  [[nodiscard]] double expectation(const Element& x) const {
    check(x);
    return gamma_expectation(to_polynomial(x), nu_ + 1.0);
  }
  [[nodiscard]] Element generator(const Element& x) const {
    check(x);
    return laguerre_generator(x);
  }
  [[nodiscard]] Element carre_du_champ(const Element& x, const Element& y) const {
    check(x);
    return laguerre_gamma(x, y);
  }
  [[nodiscard]] Element multiply(const Element& x, const Element& y) const {
    check(x);
    return laguerre_multiply(x, y);
  }
  [[nodiscard]] std::map<int, Element> eigen_project(const Element& x) const {
    check(x);
    return chaos_forge::eigen_project(x);
  }
  [[nodiscard]] std::vector<std::pair<int, Element>> eigenbasis(int max_degree) const {
    std::vector<std::pair<int, Element>> out;
    for (int p = 0; p <= max_degree; ++p)
      for (auto& i : multi_indices_of_degree(dimension_, p)) out.emplace_back(p, Element::basis(dimension_, nu_, i));
    return out;
  }

 private:
  void check(const Element& x) const {
    if (x.dimension() != dimension_ || x.nu() != nu_) throw DomainError("LaguerreStructure: element from another structure");
  }

  std::size_t dimension_;
  double nu_;
};

static_assert(DirichletStructure<LaguerreStructure>);

/// Random element of degree ≤ max_degree; each basis coefficient kept with probability `density`.
inline LaguerreElement random_laguerre_element(std::size_t dimension, double nu, int max_degree, std::mt19937_64& rng,
                                               double density = 0.6) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  LaguerreElement e(dimension, nu);
  for (int p = 0; p <= max_degree; ++p)
    for (auto& i : multi_indices_of_degree(dimension, p))
      if (keep(rng)) e.add_term(i, value(rng));
  if (e.is_zero()) e.add_term(MultiIndex(dimension, 0), 1.0);
  return e;
}

/// Random element of Ker(L + p·Id) with unit second moment.
inline LaguerreElement random_laguerre_eigenfunction(const LaguerreStructure& s, int p, std::mt19937_64& rng) {
  if (p < 1) throw DomainError("random_laguerre_eigenfunction: degree must be positive");
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  LaguerreElement x(s.dimension(), s.nu());
  for (auto& i : multi_indices_of_degree(s.dimension(), p)) x.add_term(i, value(rng));
  if (x.is_zero()) x.add_term(multi_indices_of_degree(s.dimension(), p).front(), 1.0);
  return x * (1.0 / std::sqrt(s.expectation(s.multiply(x, x))));
}

}  // namespace chaos_forge
