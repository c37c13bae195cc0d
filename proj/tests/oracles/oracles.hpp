#pragma once

// Test-only reference implementations. Each one takes a different route from
// the library code it checks: Rodrigues differentiation instead of three-term
// recurrences, Wick pairing enumeration instead of (p−1)!!, and dense
// permutation sums instead of sorted-tuple bookkeeping.

#include <chaos_forge/gaussian_algebra.hpp>
#include <chaos_forge/symmetric_tensor.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace chaos_forge::oracle {

/// Coefficients of H_k from H_k = (−1)^k e^{x²/2} d^k/dx^k e^{−x²/2}:
/// d^k e^{−x²/2} = P_k(x)e^{−x²/2} with P_{k+1} = P_k' − x·P_k.
inline std::vector<double> hermite_rodrigues(int k) {
  std::vector<double> p{1.0};
  for (int step = 0; step < k; ++step) {
    std::vector<double> next(p.size() + 1, 0.0);
    for (std::size_t j = 1; j < p.size(); ++j) next[j - 1] += static_cast<double>(j) * p[j];
    for (std::size_t j = 0; j < p.size(); ++j) next[j + 1] -= p[j];
    p = std::move(next);
  }
  if (k % 2 == 1)
    for (double& c : p) c = -c;
  return p;
}

/// Coefficients of L_n^{(ν)} from Rodrigues' formula expanded with Leibniz' rule:
/// L_n = (1/n!) Σ_j C(n,j)(−1)^j (n+ν)(n+ν−1)…(ν+j+1) x^j.
inline std::vector<double> laguerre_rodrigues(int n, double nu) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  double nfact = 1.0;
  for (int j = 2; j <= n; ++j) nfact *= j;
  for (int j = 0; j <= n; ++j) {
    double falling = 1.0;
    for (int t = 0; t < n - j; ++t) falling *= (n + nu - t);
    double binom = 1.0;
    for (int t = 1; t <= j; ++t) binom = binom * (n - j + t) / t;
    c[static_cast<std::size_t>(j)] = binom * ((j % 2) ? -1.0 : 1.0) * falling / nfact;
  }
  return c;
}

inline double eval_coeffs(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) s = s * x + c[j];
  return s;
}

/// E[Z_{i₁}⋯Z_{i_p}] by enumerating perfect matchings (Isserlis / Wick).
inline double wick_moment(std::vector<int> idx) {
  if (idx.empty()) return 1.0;
  if (idx.size() % 2 == 1) return 0.0;
  const int first = idx.front();
  double total = 0.0;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    if (idx[j] != first) continue;
    std::vector<int> rest;
    for (std::size_t t = 1; t < idx.size(); ++t)
      if (t != j) rest.push_back(idx[t]);
    total += wick_moment(rest);
  }
  return total;
}

/// E[P(Z)] through wick_moment applied monomial by monomial.
inline double wick_expectation(const Polynomial& p) {
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (int e = 0; e < m[i]; ++e) idx.push_back(static_cast<int>(i));
    sum += c * wick_moment(idx);
  }
  return sum;
}

/// Dense full tensor as a flat vector (row-major).
struct Dense {
  std::size_t d;
  int order;
  std::vector<double> v;
};

inline std::vector<int> unravel(std::size_t off, std::size_t d, int order) {
  std::vector<int> idx(static_cast<std::size_t>(order));
  for (int j = order - 1; j >= 0; --j) {
    idx[static_cast<std::size_t>(j)] = static_cast<int>(off % d);
    off /= d;
  }
  return idx;
}

inline std::size_t ravel(const std::vector<int>& idx, std::size_t d) {
  std::size_t off = 0;
  for (int i : idx) off = off * d + static_cast<std::size_t>(i);
  return off;
}

inline std::size_t ipow(std::size_t d, int k) {
  std::size_t n = 1;
  for (int j = 0; j < k; ++j) n *= d;
  return n;
}

inline Dense dense_of(const SymmetricKernel& f) {
  Dense t{f.dimension(), f.order(), std::vector<double>(ipow(f.dimension(), f.order()))};
  for (std::size_t off = 0; off < t.v.size(); ++off) t.v[off] = f.at(unravel(off, t.d, t.order));
  return t;
}

inline Dense dense_of(const PlainTensor& p) {
  return {p.dimension(), p.order(), std::vector<double>(p.data().begin(), p.data().end())};
}

/// Definition-level contraction on dense tensors.
inline Dense dense_contract(const Dense& f, const Dense& g, int r) {
  const std::size_t d = f.d;
  const int m = f.order + g.order - 2 * r;
  Dense out{d, m, std::vector<double>(ipow(d, m), 0.0)};
  for (std::size_t fo = 0; fo < f.v.size(); ++fo) {
    if (f.v[fo] == 0.0) continue;
    const auto fi = unravel(fo, d, f.order);
    for (std::size_t go = 0; go < g.v.size(); ++go) {
      if (g.v[go] == 0.0) continue;
      const auto gi = unravel(go, d, g.order);
      if (!std::equal(fi.end() - r, fi.end(), gi.end() - r)) continue;
      std::vector<int> oi(fi.begin(), fi.end() - r);
      oi.insert(oi.end(), gi.begin(), gi.end() - r);
      out.v[ravel(oi, d)] += f.v[fo] * g.v[go];
    }
  }
  return out;
}

/// (1/m!)Σ_σ t∘σ by explicit permutation enumeration.
inline Dense dense_symmetrize(const Dense& t) {
  Dense out{t.d, t.order, std::vector<double>(t.v.size(), 0.0)};
  std::vector<int> perm(static_cast<std::size_t>(t.order));
  std::iota(perm.begin(), perm.end(), 0);
  double count = 0.0;
  do {
    count += 1.0;
    for (std::size_t off = 0; off < t.v.size(); ++off) {
      const auto idx = unravel(off, t.d, t.order);
      std::vector<int> permuted(idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) permuted[j] = idx[static_cast<std::size_t>(perm[j])];
      out.v[off] += t.v[ravel(permuted, t.d)];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& x : out.v) x /= count;
  return out;
}

inline double dense_dot(const Dense& a, const Dense& b) {
  return std::inner_product(a.v.begin(), a.v.end(), b.v.begin(), 0.0);
}

inline double dense_max_diff(const Dense& a, const Dense& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) w = std::max(w, std::abs(a.v[i] - b.v[i]));
  return w;
}

}  // namespace chaos_forge::oracle
