#pragma once

// Symmetric tensors over H = R^d with orthonormal basis e₀…e_{d−1}:
// sorted-tuple storage, symmetrization, contractions and norms.

#include <chaos_forge/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chaos_forge {

/// Sorted tuple i₁ ≤ … ≤ i_k of 0-based basis indices.
using IndexTuple = std::vector<int>;

inline double factorial(int n) {
  if (n < 0) throw DomainError("factorial: negative argument");
  double f = 1.0;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return std::round(b);
}

/// Number of distinct arrangements k!/∏m_j! of a sorted tuple.
inline double arrangements(const IndexTuple& sorted) {
  double result = factorial(static_cast<int>(sorted.size()));
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    result /= factorial(static_cast<int>(j - i));
    i = j;
  }
  return result;
}

namespace detail {

using Counts = std::vector<int>;

inline Counts to_counts(const IndexTuple& t, std::size_t dimension) {
  Counts c(dimension, 0);
  for (int i : t) ++c[static_cast<std::size_t>(i)];
  return c;
}

inline IndexTuple to_tuple(const Counts& c) {
  IndexTuple t;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int m = 0; m < c[i]; ++m) t.push_back(static_cast<int>(i));
  return t;
}

inline double arrangements(const Counts& c) {
  int total = 0;
  double denom = 1.0;
  for (int m : c) {
    total += m;
    denom *= factorial(m);
  }
  return factorial(total) / denom;
}

/// Calls visit(sub) for every sub-multiset `sub` of size r with sub ≤ bound componentwise.
template <typename Visit>
void for_each_submultiset(const Counts& bound, int r, Visit&& visit) {
  Counts sub(bound.size(), 0);
  auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos == bound.size()) {
      if (remaining == 0) visit(static_cast<const Counts&>(sub));
      return;
    }
    const int hi = std::min(bound[pos], remaining);
    for (int m = 0; m <= hi; ++m) {
      sub[pos] = m;
      self(self, pos + 1, remaining - m);
    }
    sub[pos] = 0;
  };
  recurse(recurse, 0, r);
}

}  // namespace detail

/// Element of H^{⊙k}. Each stored coefficient c_α is the common value of the
/// full tensor on every permutation of the sorted tuple α; zeros are not stored.
class SymmetricKernel {
 public:
  using Coefficients = std::map<IndexTuple, double>;

  SymmetricKernel(std::size_t dimension, int order) : dimension_(dimension), order_(order) {
    if (dimension == 0) throw DomainError("SymmetricKernel: dimension must be positive");
    if (order < 0) throw DomainError("SymmetricKernel: order must be nonnegative");
  }

  /// Order-0 kernel holding a scalar.
  static SymmetricKernel scalar(std::size_t dimension, double value) {
    SymmetricKernel k(dimension, 0);
    k.add({}, value);
    return k;
  }

  /// e_i^{⊗k}.
  static SymmetricKernel basis_power(std::size_t dimension, int i, int order) {
    SymmetricKernel k(dimension, order);
    k.add(IndexTuple(static_cast<std::size_t>(order), i), 1.0);
    return k;
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] const Coefficients& coefficients() const noexcept { return coeffs_; }
  [[nodiscard]] bool is_zero() const noexcept { return coeffs_.empty(); }

  /// Tensor entry at any (not necessarily sorted) index tuple.
  [[nodiscard]] double at(IndexTuple t) const {
    std::sort(t.begin(), t.end());
    auto it = coeffs_.find(t);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  void add(IndexTuple t, double value) {
    if (t.size() != static_cast<std::size_t>(order_))
      throw RangeError("SymmetricKernel::add: tuple length " + std::to_string(t.size()) +
                       " does not match order " + std::to_string(order_));
    for (int i : t)
      if (i < 0 || static_cast<std::size_t>(i) >= dimension_)
        throw RangeError("SymmetricKernel::add: basis index out of range");
    if (value == 0.0) return;
    std::sort(t.begin(), t.end());
    auto [it, inserted] = coeffs_.try_emplace(std::move(t), value);
    if (!inserted) {
      it->second += value;
      if (it->second == 0.0) coeffs_.erase(it);
    }
  }

  SymmetricKernel& operator*=(double s) {
    if (s == 0.0) coeffs_.clear();
    for (auto& [t, c] : coeffs_) c *= s;
    return *this;
  }

  SymmetricKernel& operator+=(const SymmetricKernel& other) {
    check_compatible(other);
    for (const auto& [t, c] : other.coeffs_) add(t, c);
    return *this;
  }

  friend SymmetricKernel operator*(SymmetricKernel k, double s) { return k *= s; }
  friend SymmetricKernel operator*(double s, SymmetricKernel k) { return k *= s; }
  friend SymmetricKernel operator+(SymmetricKernel a, const SymmetricKernel& b) { return a += b; }
  friend SymmetricKernel operator-(SymmetricKernel a, const SymmetricKernel& b) { return a += b * -1.0; }

  /// Scalar value of an order-0 kernel.
  [[nodiscard]] double scalar_value() const {
    if (order_ != 0) throw RangeError("SymmetricKernel::scalar_value: order is not 0");
    return coeffs_.empty() ? 0.0 : coeffs_.begin()->second;
  }

  void check_compatible(const SymmetricKernel& other) const {
    if (other.dimension_ != dimension_ || other.order_ != order_)
      throw RangeError("SymmetricKernel: dimension/order mismatch");
  }

 private:
  std::size_t dimension_;
  int order_;
  Coefficients coeffs_;
};

/// Dense element of H^{⊗m}; entry (i₁,…,i_m) at row-major offset.
class PlainTensor {
 public:
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 24;

  PlainTensor(std::size_t dimension, int order) : dimension_(dimension), order_(order) {
    if (dimension == 0) throw DomainError("PlainTensor: dimension must be positive");
    if (order < 0) throw DomainError("PlainTensor: order must be nonnegative");
    std::size_t n = 1;
    for (int j = 0; j < order; ++j) {
      n *= dimension;
      if (n > kMaxEntries) throw RangeError("PlainTensor: d^m exceeds dense size limit");
    }
    data_.assign(n, 0.0);
  }

  /// e_{i₁}⊗…⊗e_{i_m}.
  static PlainTensor basis(std::size_t dimension, const std::vector<int>& indices) {
    PlainTensor t(dimension, static_cast<int>(indices.size()));
    t.at(indices) = 1.0;
    return t;
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }

  [[nodiscard]] std::size_t offset(std::span<const int> idx) const {
    if (idx.size() != static_cast<std::size_t>(order_)) throw RangeError("PlainTensor: index length mismatch");
    std::size_t off = 0;
    for (int i : idx) {
      if (i < 0 || static_cast<std::size_t>(i) >= dimension_) throw RangeError("PlainTensor: index out of range");
      off = off * dimension_ + static_cast<std::size_t>(i);
    }
    return off;
  }

  double& at(std::span<const int> idx) { return data_[offset(idx)]; }
  [[nodiscard]] double at(std::span<const int> idx) const { return data_[offset(idx)]; }

  /// Index tuple at a row-major offset.
  [[nodiscard]] std::vector<int> unravel(std::size_t off) const {
    std::vector<int> idx(static_cast<std::size_t>(order_));
    for (int j = order_ - 1; j >= 0; --j) {
      idx[static_cast<std::size_t>(j)] = static_cast<int>(off % dimension_);
      off /= dimension_;
    }
    return idx;
  }

 private:
  std::size_t dimension_;
  int order_;
  std::vector<double> data_;
};

/// Dense expansion of a symmetric kernel.
inline PlainTensor to_plain(const SymmetricKernel& f) {
  PlainTensor t(f.dimension(), f.order());
  for (std::size_t off = 0; off < t.data().size(); ++off) t.data()[off] = f.at(t.unravel(off));
  return t;
}

/// (1/m!)Σ_σ t∘σ, stored on sorted tuples: the average of t over the distinct
/// arrangements of each tuple.
inline SymmetricKernel symmetrize(const PlainTensor& t) {
  std::map<IndexTuple, double> sums;
  for (std::size_t off = 0; off < t.data().size(); ++off) {
    const double v = t.data()[off];
    if (v == 0.0) continue;
    auto idx = t.unravel(off);
    std::sort(idx.begin(), idx.end());
    sums[idx] += v;
  }
  SymmetricKernel out(t.dimension(), t.order());
  for (auto& [idx, s] : sums) out.add(idx, s / arrangements(idx));
  return out;
}

inline void check_contraction_order(const SymmetricKernel& f, const SymmetricKernel& g, int r) {
  if (f.dimension() != g.dimension()) throw RangeError("contract: dimension mismatch");
  if (r < 0 || r > std::min(f.order(), g.order()))
    throw RangeError("contract: order r = " + std::to_string(r) + " outside [0, min(" +
                     std::to_string(f.order()) + ", " + std::to_string(g.order()) + ")]");
}

/// f ⊗_r g by explicit index summation:
/// (f ⊗_r g)(a, b) = Σ_{i ∈ [d]^r} f(a, i)·g(b, i), with a of length k−r and b of length j−r.
inline PlainTensor contract(const SymmetricKernel& f, const SymmetricKernel& g, int r) {
  check_contraction_order(f, g, r);
  const std::size_t d = f.dimension();
  const int k = f.order();
  const int j = g.order();
  PlainTensor out(d, k + j - 2 * r);
  PlainTensor shared(d, r);
  const std::size_t n_shared = shared.data().size();

  IndexTuple fa(static_cast<std::size_t>(k));
  IndexTuple gb(static_cast<std::size_t>(j));
  for (std::size_t off = 0; off < out.data().size(); ++off) {
    const auto ab = out.unravel(off);
    std::copy(ab.begin(), ab.begin() + (k - r), fa.begin());
    std::copy(ab.begin() + (k - r), ab.end(), gb.begin());
    double sum = 0.0;
    for (std::size_t s = 0; s < n_shared; ++s) {
      const auto i = shared.unravel(s);
      std::copy(i.begin(), i.end(), fa.begin() + (k - r));
      std::copy(i.begin(), i.end(), gb.begin() + (j - r));
      sum += f.at(fa) * g.at(gb);
    }
    out.data()[off] = sum;
  }
  return out;
}

/// f ⊗̃_r g = symmetrize(f ⊗_r g), computed on sorted-tuple storage.
///
/// Grouping the index sum by multisets, the entry at a sorted tuple γ is
/// (1/arr(γ)) Σ arr(A)·arr(B)·arr(I)·f[A⊎I]·g[B⊎I] over A⊎B = γ, |I| = r,
/// so each pair of stored entries contributes once per common sub-multiset I.
inline SymmetricKernel sym_contract(const SymmetricKernel& f, const SymmetricKernel& g, int r) {
  check_contraction_order(f, g, r);
  const std::size_t d = f.dimension();
  std::map<detail::Counts, double> acc;

  std::vector<std::pair<detail::Counts, double>> gs;
  gs.reserve(g.coefficients().size());
  for (const auto& [beta, cb] : g.coefficients()) gs.emplace_back(detail::to_counts(beta, d), cb);

  detail::Counts common(d);
  detail::Counts gamma(d);
  detail::Counts rest_a(d);
  detail::Counts rest_b(d);
  for (const auto& [alpha, ca] : f.coefficients()) {
    const auto a_counts = detail::to_counts(alpha, d);
    for (const auto& [b_counts, cb] : gs) {
      for (std::size_t i = 0; i < d; ++i) common[i] = std::min(a_counts[i], b_counts[i]);
      detail::for_each_submultiset(common, r, [&](const detail::Counts& shared) {
        for (std::size_t i = 0; i < d; ++i) {
          rest_a[i] = a_counts[i] - shared[i];
          rest_b[i] = b_counts[i] - shared[i];
          gamma[i] = rest_a[i] + rest_b[i];
        }
        acc[gamma] += detail::arrangements(rest_a) * detail::arrangements(rest_b) *
                      detail::arrangements(shared) * ca * cb;
      });
    }
  }

  SymmetricKernel out(d, f.order() + g.order() - 2 * r);
  for (const auto& [counts, s] : acc) out.add(detail::to_tuple(counts), s / detail::arrangements(counts));
  return out;
}

/// ⟨f, g⟩_{H^{⊗k}} = Σ_α c_α·c'_α·k!/∏m_j!.
inline double kernel_inner_product(const SymmetricKernel& f, const SymmetricKernel& g) {
  f.check_compatible(g);
  double sum = 0.0;
  const auto& small = f.coefficients().size() <= g.coefficients().size() ? f : g;
  const auto& large = &small == &f ? g : f;
  for (const auto& [t, c] : small.coefficients()) {
    auto it = large.coefficients().find(t);
    if (it != large.coefficients().end()) sum += c * it->second * arrangements(t);
  }
  return sum;
}

/// ‖f‖²_{H^{⊗k}} (plain tensor norm, without the k! of the isometry).
inline double kernel_norm_sq(const SymmetricKernel& f) { return kernel_inner_product(f, f); }

/// ⟨s, t⟩ over all d^m entries of two dense tensors.
inline double plain_inner_product(const PlainTensor& s, const PlainTensor& t) {
  if (s.dimension() != t.dimension() || s.order() != t.order()) throw RangeError("plain_inner_product: shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < s.data().size(); ++i) sum += s.data()[i] * t.data()[i];
  return sum;
}

/// Largest absolute entrywise difference between two kernels.
inline double max_abs_difference(const SymmetricKernel& a, const SymmetricKernel& b) {
  double worst = 0.0;
  const SymmetricKernel diff = a - b;
  for (const auto& [t, c] : diff.coefficients()) worst = std::max(worst, std::abs(c));
  return worst;
}

}  // namespace chaos_forge
