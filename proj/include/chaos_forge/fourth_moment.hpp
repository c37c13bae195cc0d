#pragma once

// Exact contraction identities for the variance of the Stein kernel term and
// the fourth cumulant of a pure chaos element, the inequality linking them, and
// its analogue on an abstract Dirichlet structure.

#include <chaos_forge/dirichlet_structure.hpp>
#include <chaos_forge/errors.hpp>
#include <chaos_forge/malliavin_ops.hpp>
#include <chaos_forge/symmetric_tensor.hpp>
#include <chaos_forge/wiener_chaos.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace chaos_forge {

/// A sum over contraction orders r = 1…k−1 with its individual terms.
struct ContractionSum {
  double value = 0.0;
  std::map<int, double> terms;
};

namespace detail {

inline void check_order(const SymmetricKernel& f, int k, const char* who) {
  if (k < 1) throw RangeError(std::string(who) + ": order must be at least 1");
  if (f.order() != k) throw RangeError(std::string(who) + ": kernel order does not match k");
}

/// (r!)²·C(k,r)⁴·(2k−2r)!·‖f ⊗̃_r f‖².
inline double contraction_weight(const SymmetricKernel& f, int k, int r) {
  const double rf = factorial(r);
  const double c = binomial(k, r);
  return rf * rf * c * c * c * c * factorial(2 * k - 2 * r) * kernel_norm_sq(sym_contract(f, f, r));
}

}  // namespace detail

/// Var⟨DF, −DL⁻¹F⟩ for F = I_k(f) as Σ_r (r²/k²)·(r!)²C(k,r)⁴(2k−2r)!‖f ⊗̃_r f‖².
inline ContractionSum step1_variance(const SymmetricKernel& f, int k) {
  detail::check_order(f, k, "step1_variance");
  ContractionSum out;
  for (int r = 1; r < k; ++r) {
    const double term = static_cast<double>(r * r) / static_cast<double>(k * k) * detail::contraction_weight(f, k, r);
    out.terms.emplace(r, term);
    out.value += term;
  }
  return out;
}

/// E F⁴ − 3(E F²)² for F = I_k(f) as (3/k)·Σ_r r·(r!)²C(k,r)⁴(2k−2r)!‖f ⊗̃_r f‖².
inline ContractionSum step2_cumulant(const SymmetricKernel& f, int k) {
  detail::check_order(f, k, "step2_cumulant");
  ContractionSum out;
  for (int r = 1; r < k; ++r) {
    const double term = 3.0 / k * r * detail::contraction_weight(f, k, r);
    out.terms.emplace(r, term);
    out.value += term;
  }
  return out;
}

struct FourthMomentReport {
  int k = 0;
  double e_f2 = 0.0;
  double e_f4 = 0.0;
  double var_stein_kernel = 0.0;
  ContractionSum step1;
  ContractionSum step2;
  double bound_rhs = 0.0;
  double margin = 0.0;
  double tv_bound = 0.0;
  double fourth_moment_tv_bound = 0.0;
  double e_f2_gamma = 0.0;
  std::map<int, double> contraction_norms;

  [[nodiscard]] bool inequality_holds(double tolerance = 1e-9) const { return margin >= -tolerance; }
};

namespace detail {

inline void check_agreement(double a, double b, double tolerance, const std::string& what) {
  if (std::abs(a - b) > tolerance * std::max(1.0, std::max(std::abs(a), std::abs(b))))
    throw InvariantViolation(what + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace detail

/// Var⟨DF, −DL⁻¹F⟩ ≤ (k−1)/(3k)·(E F⁴ − 3) for a unit-variance F = I_k(f).
inline FourthMomentReport fundamental_inequality(const SymmetricKernel& f, int k) {
  detail::check_order(f, k, "fundamental_inequality");
  if (k < 2) throw RangeError("fundamental_inequality: order must be at least 2");
  const ChaosElement F = multiple_integral(f);

  FourthMomentReport rep;
  rep.k = k;
  rep.e_f2 = second_moment(F);
  if (std::abs(rep.e_f2 - 1.0) > 1e-9) throw NormalizationError("fundamental_inequality: E F² must be 1");
  const ChaosElement square = chaos_product(F, F);
  rep.e_f4 = second_moment(square);
  rep.var_stein_kernel = variance(stein_kernel_term(F));
  rep.step1 = step1_variance(f, k);
  rep.step2 = step2_cumulant(f, k);
  for (int r = 1; r < k; ++r) rep.contraction_norms.emplace(r, kernel_norm_sq(sym_contract(f, f, r)));
  rep.bound_rhs = static_cast<double>(k - 1) / (3.0 * k) * rep.step2.value;
  rep.margin = rep.bound_rhs - rep.var_stein_kernel;
  rep.tv_bound = 2.0 * std::sqrt(std::max(0.0, rep.var_stein_kernel));
  rep.fourth_moment_tv_bound = 2.0 * std::sqrt(std::max(0.0, rep.bound_rhs));
  rep.e_f2_gamma = inner_product(square, gamma(F, F));

  detail::check_agreement(rep.var_stein_kernel, rep.step1.value, 1e-9, "Var of Stein kernel term vs step 1");
  detail::check_agreement(rep.e_f4 - 3.0 * rep.e_f2 * rep.e_f2, rep.step2.value, 1e-9,
                          "fourth cumulant vs step 2");
  detail::check_agreement(rep.e_f2_gamma, k / 3.0 * rep.e_f4, 1e-9, "E[F²‖DF‖²] vs (k/3)E F⁴");
  return rep;
}

struct DirichletBound {
  int lambda = 0;
  double e_x2 = 0.0;
  double e_x4 = 0.0;
  double e_gamma = 0.0;
  double var_gamma = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tv_bound = 0.0;
};

/// Var Γ[X,X] ≤ (λ²/3)(E X⁴ − 3) for a unit-variance eigenfunction X of −L.
template <DirichletStructure S>
DirichletBound dirichlet_fourth_moment_bound(const S& s, const typename S::Element& x, int lambda) {
  if (lambda < 1) throw DomainError("dirichlet_fourth_moment_bound: eigenvalue must be positive");
  if (eigen_residual(s, x, lambda) > 1e-9)
    throw DomainError("dirichlet_fourth_moment_bound: ‖LX + λX‖ exceeds 1e-9");
  DirichletBound out;
  out.lambda = lambda;
  const auto square = s.multiply(x, x);
  out.e_x2 = s.expectation(square);
  if (std::abs(out.e_x2 - 1.0) > 1e-9) throw NormalizationError("dirichlet_fourth_moment_bound: E X² must be 1");
  out.e_x4 = s.expectation(s.multiply(square, square));
  const auto g = s.carre_du_champ(x, x);
  out.e_gamma = s.expectation(g);
  out.var_gamma = s.expectation(s.multiply(g, g)) - out.e_gamma * out.e_gamma;
  detail::check_agreement(out.e_gamma, static_cast<double>(lambda), 1e-9, "E Γ[X,X] vs λ");
  out.rhs = static_cast<double>(lambda) * lambda / 3.0 * (out.e_x4 - 3.0);
  out.margin = out.rhs - out.var_gamma;
  out.tv_bound = std::sqrt(std::max(0.0, out.e_x4 / 3.0 - 1.0));
  return out;
}

}  // namespace chaos_forge
