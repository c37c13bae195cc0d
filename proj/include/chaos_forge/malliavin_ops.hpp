#pragma once

// Malliavin operators on finite chaos expansions: D, L, L⁻¹, Γ, the Stein
// kernel term ⟨DF, −DL⁻¹F⟩ and the duality residual of δD = −L.

#include <chaos_forge/errors.hpp>
#include <chaos_forge/wiener_chaos.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace chaos_forge {

/// An H-valued random variable: component x is the coordinate along e_x.
struct HValuedChaos {
  std::vector<ChaosElement> components;

  [[nodiscard]] std::size_t dimension() const noexcept { return components.size(); }
};

/// f(·, x): fixes one slot of a symmetric kernel of order k ≥ 1 to basis index x.
/// Entries of the slice are read directly since c_α is the full-tensor value.
inline SymmetricKernel kernel_slice(const SymmetricKernel& f, int x) {
  if (f.order() < 1) throw RangeError("kernel_slice: order-0 kernel has no free slot");
  SymmetricKernel out(f.dimension(), f.order() - 1);
  for (const auto& [alpha, c] : f.coefficients()) {
    auto pos = std::find(alpha.begin(), alpha.end(), x);
    if (pos == alpha.end()) continue;
    IndexTuple beta = alpha;
    beta.erase(beta.begin() + (pos - alpha.begin()));
    out.add(std::move(beta), c);
  }
  return out;
}

/// D_x F = Σ_k k·I_{k−1}(f_k(·, x)).
inline HValuedChaos derivative(const ChaosElement& f) {
  const std::size_t d = f.dimension();
  HValuedChaos out{std::vector<ChaosElement>(d, ChaosElement(d))};
  for (const auto& [k, fk] : f.kernels())
    for (std::size_t x = 0; x < d; ++x) out.components[x].add(kernel_slice(fk, static_cast<int>(x)) * k);
  return out;
}

/// L F = Σ_k (−k)·J_k F.
inline ChaosElement ou_generator(const ChaosElement& f) {
  ChaosElement out(f.dimension());
  for (const auto& [k, fk] : f.kernels()) out.add(fk * static_cast<double>(-k));
  return out;
}

/// L⁻¹F = Σ_k (−1/k)·J_k F; constants are annihilated.
inline ChaosElement pseudo_inverse(const ChaosElement& f) {
  ChaosElement out(f.dimension());
  for (const auto& [k, fk] : f.kernels()) out.add(fk * (-1.0 / k));
  return out;
}

/// ⟨u, v⟩_H as a chaos element: Σ_x u_x·v_x.
inline ChaosElement h_inner(const HValuedChaos& u, const HValuedChaos& v) {
  if (u.dimension() != v.dimension() || u.dimension() == 0) throw RangeError("h_inner: dimension mismatch");
  ChaosElement out(u.dimension());
  for (std::size_t x = 0; x < u.dimension(); ++x) out += chaos_product(u.components[x], v.components[x]);
  return out;
}

/// Γ[F, G] = ⟨DF, DG⟩_H.
inline ChaosElement gamma(const ChaosElement& f, const ChaosElement& g) { return h_inner(derivative(f), derivative(g)); }

/// ⟨DF, −DL⁻¹F⟩_H.
inline ChaosElement stein_kernel_term(const ChaosElement& f) {
  return h_inner(derivative(f), derivative(pseudo_inverse(f) * -1.0));
}

/// Recovers G (with E G = 0) such that DG = u; throws DomainError if u is not a gradient.
inline ChaosElement integrate_gradient(const HValuedChaos& u, double tolerance = 1e-12) {
  const std::size_t d = u.dimension();
  if (d == 0) throw DomainError("integrate_gradient: empty H-valued element");
  std::map<int, SymmetricKernel> kernels;
  for (std::size_t x = 0; x < d; ++x) {
    const ChaosElement& ux = u.components[x];
    if (ux.dimension() != d) throw DomainError("integrate_gradient: component dimension mismatch");
    for (int m = 0; m <= ux.max_order(); ++m) {
      const SymmetricKernel s = ux.kernel(m);
      const int k = m + 1;
      auto [it, inserted] = kernels.try_emplace(k, d, k);
      for (const auto& [beta, c] : s.coefficients()) {
        IndexTuple alpha = beta;
        alpha.push_back(static_cast<int>(x));
        const double candidate = c / k;
        const double existing = it->second.at(alpha);
        if (existing == 0.0) {
          it->second.add(alpha, candidate);
        } else if (std::abs(existing - candidate) > tolerance * std::max(1.0, std::abs(candidate))) {
          throw DomainError("integrate_gradient: u is not of the form DG (asymmetric kernel data)");
        }
      }
    }
  }
  ChaosElement g(d);
  for (const auto& [k, f] : kernels) g.add(f);

  const HValuedChaos check = derivative(g);
  for (std::size_t x = 0; x < d; ++x) {
    if (max_abs_difference(check.components[x], u.components[x]) > tolerance * 10.0)
      throw DomainError("integrate_gradient: u is not of the form DG (component " + std::to_string(x) + ")");
  }
  return g;
}

/// E[F·δu] − E[⟨DF, u⟩_H] for u = DG, where δu = δDG = −LG.
inline double duality_check(const ChaosElement& f, const HValuedChaos& u) {
  if (u.dimension() != f.dimension()) throw RangeError("duality_check: dimension mismatch");
  const ChaosElement g = integrate_gradient(u);
  const ChaosElement delta_u = ou_generator(g) * -1.0;
  const HValuedChaos df = derivative(f);
  double pairing = 0.0;
  for (std::size_t x = 0; x < u.dimension(); ++x) pairing += inner_product(df.components[x], u.components[x]);
  return inner_product(f, delta_u) - pairing;
}

}  // namespace chaos_forge
