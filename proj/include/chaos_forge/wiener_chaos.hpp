#pragma once

// Finite Wiener chaos expansions F = c₀ + Σ_k I_k(f_k) over a d-dimensional
// isonormal Gaussian family X(e₀),…,X(e_{d−1}).

#include <chaos_forge/errors.hpp>
#include <chaos_forge/gaussian_algebra.hpp>
#include <chaos_forge/symmetric_tensor.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace chaos_forge {

inline constexpr int kChaosDegreeCap = 16;

class ChaosElement {
 public:
  using Kernels = std::map<int, SymmetricKernel>;

  explicit ChaosElement(std::size_t dimension, double constant = 0.0)
      : dimension_(dimension), constant_(constant) {
    if (dimension == 0) throw DomainError("ChaosElement: dimension must be positive");
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] double constant() const noexcept { return constant_; }
  [[nodiscard]] const Kernels& kernels() const noexcept { return kernels_; }

  /// Highest chaos order present; 0 for constants.
  [[nodiscard]] int max_order() const noexcept { return kernels_.empty() ? 0 : kernels_.rbegin()->first; }

  /// f_k, or the zero kernel if J_k F = 0.
  [[nodiscard]] SymmetricKernel kernel(int k) const {
    if (k == 0) return SymmetricKernel::scalar(dimension_, constant_);
    auto it = kernels_.find(k);
    return it == kernels_.end() ? SymmetricKernel(dimension_, k) : it->second;
  }

  /// Adds I_k(f) (or f as a constant when k = 0).
  void add(const SymmetricKernel& f) {
    if (f.dimension() != dimension_) throw RangeError("ChaosElement::add: dimension mismatch");
    if (f.order() > kChaosDegreeCap)
      throw DegreeCapError("ChaosElement: order " + std::to_string(f.order()) + " exceeds cap " +
                           std::to_string(kChaosDegreeCap));
    if (f.order() == 0) {
      constant_ += f.scalar_value();
      return;
    }
    if (f.is_zero()) return;
    auto [it, inserted] = kernels_.try_emplace(f.order(), f);
    if (!inserted) {
      it->second += f;
      if (it->second.is_zero()) kernels_.erase(it);
    }
  }

  void add_constant(double c) { constant_ += c; }

  /// J_k F as an element (k = 0 gives E F).
  [[nodiscard]] ChaosElement projection(int k) const {
    ChaosElement out(dimension_);
    if (k == 0) {
      out.constant_ = constant_;
    } else if (auto it = kernels_.find(k); it != kernels_.end()) {
      out.kernels_.emplace(k, it->second);
    }
    return out;
  }

  ChaosElement& operator+=(const ChaosElement& other) {
    check_dimension(other);
    constant_ += other.constant_;
    for (const auto& [k, f] : other.kernels_) add(f);
    return *this;
  }

  ChaosElement& operator*=(double s) {
    constant_ *= s;
    if (s == 0.0) kernels_.clear();
    for (auto& [k, f] : kernels_) f *= s;
    return *this;
  }

  friend ChaosElement operator+(ChaosElement a, const ChaosElement& b) { return a += b; }
  friend ChaosElement operator-(ChaosElement a, const ChaosElement& b) { return a += b * -1.0; }
  friend ChaosElement operator*(ChaosElement a, double s) { return a *= s; }
  friend ChaosElement operator*(double s, ChaosElement a) { return a *= s; }

  void check_dimension(const ChaosElement& other) const {
    if (other.dimension_ != dimension_) throw RangeError("ChaosElement: dimension mismatch");
  }

 private:
  std::size_t dimension_;
  double constant_;
  Kernels kernels_;
};

/// Pure k-th chaos element I_k(f).
inline ChaosElement multiple_integral(const SymmetricKernel& f) {
  if (f.order() < 1) throw DomainError("multiple_integral: kernel order must be at least 1");
  ChaosElement out(f.dimension());
  out.add(f);
  return out;
}

/// E[F] = c₀ by orthogonality of the chaoses.
inline double expectation(const ChaosElement& f) { return f.constant(); }

/// E[F·G] = c₀c₀' + Σ_k k!·⟨f_k, g_k⟩.
inline double inner_product(const ChaosElement& f, const ChaosElement& g) {
  f.check_dimension(g);
  double sum = f.constant() * g.constant();
  for (const auto& [k, fk] : f.kernels()) {
    auto it = g.kernels().find(k);
    if (it != g.kernels().end()) sum += factorial(k) * kernel_inner_product(fk, it->second);
  }
  return sum;
}

inline double second_moment(const ChaosElement& f) { return inner_product(f, f); }

inline double variance(const ChaosElement& f) { return second_moment(f) - f.constant() * f.constant(); }

/// Pointwise product through the product formula
/// I_p(f)·I_q(g) = Σ_r r!·C(p,r)·C(q,r)·I_{p+q−2r}(f ⊗̃_r g), summed over chaos pairs.
inline ChaosElement chaos_product(const ChaosElement& a, const ChaosElement& b) {
  a.check_dimension(b);
  if (a.max_order() + b.max_order() > kChaosDegreeCap)
    throw DegreeCapError("chaos_product: degree " + std::to_string(a.max_order() + b.max_order()) +
                         " exceeds cap " + std::to_string(kChaosDegreeCap));
  const std::size_t d = a.dimension();
  ChaosElement out(d, a.constant() * b.constant());
  for (const auto& [q, g] : b.kernels()) out.add(g * a.constant());
  for (const auto& [p, f] : a.kernels()) out.add(f * b.constant());
  for (const auto& [p, f] : a.kernels()) {
    for (const auto& [q, g] : b.kernels()) {
      for (int r = 0; r <= std::min(p, q); ++r) {
        const double weight = factorial(r) * binomial(p, r) * binomial(q, r);
        out.add(sym_contract(f, g, r) * weight);
      }
    }
  }
  return out;
}

/// E[F^p], via E[F^⌈p/2⌉ · F^⌊p/2⌋] so the top-degree product is never formed.
inline double moment(const ChaosElement& f, int p) {
  if (p < 1) throw DomainError("moment: order must be at least 1");
  if (p * f.max_order() > kChaosDegreeCap)
    throw DegreeCapError("moment: p * max_order = " + std::to_string(p * f.max_order()) + " exceeds cap " +
                         std::to_string(kChaosDegreeCap));
  ChaosElement lo(f.dimension(), 1.0);
  for (int j = 0; j < p / 2; ++j) lo = chaos_product(lo, f);
  const ChaosElement hi = p % 2 == 0 ? lo : chaos_product(lo, f);
  return inner_product(lo, hi);
}

/// Polynomial realization: I_k(f) = Σ_α c_α·(k!/∏m_j!)·∏_j H_{m_j}(x_{i_j}).
inline Polynomial to_polynomial(const ChaosElement& f) {
  const std::size_t d = f.dimension();
  const HermiteTable table(std::max(f.max_order(), 1));
  Polynomial out = Polynomial::constant(d, f.constant());
  for (const auto& [k, fk] : f.kernels()) {
    for (const auto& [alpha, c] : fk.coefficients()) {
      Polynomial term = Polynomial::constant(d, c * arrangements(alpha));
      const auto counts = detail::to_counts(alpha, d);
      for (std::size_t i = 0; i < d; ++i)
        if (counts[i] > 0) term *= Polynomial::univariate(d, i, table.row_as_double(counts[i]));
      out += term;
    }
  }
  return out;
}

/// Chaos decomposition of a polynomial by Hermite-basis expansion,
/// x^p = Σ_j C(p,2j)·(2j−1)!!·H_{p−2j}(x), coordinate by coordinate.
inline ChaosElement from_polynomial(const Polynomial& p) {
  if (p.degree() > kChaosDegreeCap)
    throw DegreeCapError("from_polynomial: degree " + std::to_string(p.degree()) + " exceeds cap " +
                         std::to_string(kChaosDegreeCap));
  const std::size_t d = p.dimension();
  std::map<MultiIndex, double> hermite_coeffs;
  for (const auto& [m, c] : p.terms()) {
    // Expand ∏_i x_i^{m_i} into ∏_i Σ_j w_{i,j} H_{m_i − 2j}.
    std::vector<std::pair<MultiIndex, double>> partial{{MultiIndex(d, 0), c}};
    for (std::size_t i = 0; i < d; ++i) {
      if (m[i] == 0) continue;
      std::vector<std::pair<MultiIndex, double>> next;
      for (int j = 0; 2 * j <= m[i]; ++j) {
        const double w = binomial(m[i], 2 * j) * gaussian_moment(2 * j);
        for (const auto& [idx, v] : partial) {
          MultiIndex nidx = idx;
          nidx[i] = m[i] - 2 * j;
          next.emplace_back(std::move(nidx), v * w);
        }
      }
      partial = std::move(next);
    }
    for (auto& [idx, v] : partial) hermite_coeffs[idx] += v;
  }

  ChaosElement out(d);
  std::map<int, SymmetricKernel> kernels;
  for (const auto& [idx, b] : hermite_coeffs) {
    if (b == 0.0) continue;
    const int k = total_degree(idx);
    if (k == 0) {
      out.add_constant(b);
      continue;
    }
    const IndexTuple alpha = detail::to_tuple(idx);
    auto [it, inserted] = kernels.try_emplace(k, d, k);
    it->second.add(alpha, b / arrangements(alpha));
  }
  for (const auto& [k, f] : kernels) out.add(f);
  return out;
}

/// Largest absolute coefficient difference across all chaoses.
inline double max_abs_difference(const ChaosElement& a, const ChaosElement& b) {
  a.check_dimension(b);
  double worst = std::abs(a.constant() - b.constant());
  const ChaosElement diff = a - b;
  for (const auto& [k, f] : diff.kernels())
    for (const auto& [t, c] : f.coefficients()) worst = std::max(worst, std::abs(c));
  return worst;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Engine for substream `stream` of root seed `seed`; distinct streams are independent.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// One realization of (X(e₀),…,X(e_{d−1})).
struct GaussianSample {
  std::vector<double> x;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t draw = 0;
};

/// n i.i.d. evaluations of F at i.i.d. standard Gaussian vectors; deterministic in (seed, stream).
inline std::vector<double> sample(const ChaosElement& f, std::size_t n, std::uint64_t seed,
                                  std::uint64_t stream = 0) {
  if (n < 1) throw DomainError("sample: count must be at least 1");
  const Polynomial poly = to_polynomial(f);
  auto engine = make_engine(seed, stream);
  std::normal_distribution<double> normal;
  std::vector<double> x(f.dimension());
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (double& xi : x) xi = normal(engine);
    out.push_back(poly.evaluate(x));
  }
  return out;
}

/// Draws `n` realizations of the isonormal family itself.
inline std::vector<GaussianSample> draw_gaussian_samples(std::size_t dimension, std::size_t n, std::uint64_t seed,
                                                         std::uint64_t stream = 0) {
  auto engine = make_engine(seed, stream);
  std::normal_distribution<double> normal;
  std::vector<GaussianSample> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    out[s].x.resize(dimension);
    for (double& xi : out[s].x) xi = normal(engine);
    out[s].seed = seed;
    out[s].stream = stream;
    out[s].draw = s;
  }
  return out;
}

}  // namespace chaos_forge
