#pragma once

// Seeded random kernels and chaos elements for corpus sweeps.

#include <chaos_forge/errors.hpp>
#include <chaos_forge/symmetric_tensor.hpp>
#include <chaos_forge/wiener_chaos.hpp>

#include <cmath>
#include <random>
#include <vector>

namespace chaos_forge {

/// All sorted tuples of length k over {0,…,d−1}.
inline std::vector<IndexTuple> sorted_tuples(std::size_t dimension, int order) {
  std::vector<IndexTuple> out;
  IndexTuple cur;
  auto recurse = [&](auto&& self, int lo) -> void {
    if (static_cast<int>(cur.size()) == order) {
      out.push_back(cur);
      return;
    }
    for (int i = lo; i < static_cast<int>(dimension); ++i) {
      cur.push_back(i);
      self(self, i);
      cur.pop_back();
    }
  };
  recurse(recurse, 0);
  return out;
}

/// Sparse random kernel: each sorted tuple kept with probability `density`,
/// value uniform in [−1, 1]. Never returns the zero kernel for order ≥ 1.
inline SymmetricKernel random_kernel(std::size_t dimension, int order, std::mt19937_64& rng,
                                     double density = 0.5) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  const auto tuples = sorted_tuples(dimension, order);
  SymmetricKernel f(dimension, order);
  for (const auto& t : tuples)
    if (keep(rng)) f.add(t, value(rng));
  if (f.is_zero()) {
    std::uniform_int_distribution<std::size_t> pick(0, tuples.size() - 1);
    f.add(tuples[pick(rng)], 0.5 + 0.5 * std::abs(value(rng)));
  }
  return f;
}

/// c₀ + Σ_{k ≤ max_order} I_k(f_k) with each chaos present with probability 1/2
/// (at least one nonconstant chaos always present).
inline ChaosElement random_chaos_element(std::size_t dimension, int max_order, std::mt19937_64& rng,
                                         double density = 0.5) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::bernoulli_distribution present(0.5);
  ChaosElement f(dimension, value(rng));
  for (int k = 1; k <= max_order; ++k)
    if (present(rng)) f.add(random_kernel(dimension, k, rng, density));
  if (f.max_order() == 0) {
    std::uniform_int_distribution<int> pick(1, max_order);
    f.add(random_kernel(dimension, pick(rng), rng, density));
  }
  return f;
}

/// f / √(k!‖f‖²), so that E[I_k(f)²] = 1.
inline SymmetricKernel unit_variance_kernel(const SymmetricKernel& f) {
  const double second = factorial(f.order()) * kernel_norm_sq(f);
  if (!(second > 0.0)) throw NormalizationError("unit_variance_kernel: zero kernel");
  return f * (1.0 / std::sqrt(second));
}

}  // namespace chaos_forge
