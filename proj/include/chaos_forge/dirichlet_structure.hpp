#pragma once

// Abstract Dirichlet structure interface (expectation, generator L, carré du
// champ Γ, eigenspace projection) and its Wiener-space instance.

#include <chaos_forge/errors.hpp>
#include <chaos_forge/malliavin_ops.hpp>
#include <chaos_forge/random_corpus.hpp>
#include <chaos_forge/symmetric_tensor.hpp>
#include <chaos_forge/wiener_chaos.hpp>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace chaos_forge {

/// Eigenvalues of −L are the nonnegative integers in every structure shipped here.
template <class S>
concept DirichletStructure = requires(const S& s, const typename S::Element& x, const typename S::Element& y,
                                      int degree, double a) {
  { s.dimension() } -> std::convertible_to<std::size_t>;
  { s.expectation(x) } -> std::convertible_to<double>;
  { s.generator(x) } -> std::same_as<typename S::Element>;
  { s.carre_du_champ(x, y) } -> std::same_as<typename S::Element>;
  { s.multiply(x, y) } -> std::same_as<typename S::Element>;
  { s.eigen_project(x) } -> std::same_as<std::map<int, typename S::Element>>;
  { s.eigenbasis(degree) } -> std::same_as<std::vector<std::pair<int, typename S::Element>>>;
  { x + y } -> std::convertible_to<typename S::Element>;
  { x * a } -> std::convertible_to<typename S::Element>;
};

template <DirichletStructure S>
double l2_norm(const S& s, const typename S::Element& x) {
  return std::sqrt(std::max(0.0, s.expectation(s.multiply(x, x))));
}

/// ‖L X + λX‖ in L²(μ).
template <DirichletStructure S>
double eigen_residual(const S& s, const typename S::Element& x, int lambda) {
  return l2_norm(s, s.generator(x) + x * static_cast<double>(lambda));
}

class WienerStructure {
 public:
  using Element = ChaosElement;

  explicit WienerStructure(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw DomainError("WienerStructure: dimension must be positive");
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] double expectation(const Element& x) const { return chaos_forge::expectation(x); }
  [[nodiscard]] Element generator(const Element& x) const { return ou_generator(x); }
  [[nodiscard]] Element carre_du_champ(const Element& x, const Element& y) const { return gamma(x, y); }
  [[nodiscard]] Element multiply(const Element& x, const Element& y) const { return chaos_product(x, y); }

  [[nodiscard]] std::map<int, Element> eigen_project(const Element& x) const {
    std::map<int, Element> out;
    if (x.constant() != 0.0) out.emplace(0, x.projection(0));
    for (const auto& [k, f] : x.kernels()) out.emplace(k, x.projection(k));
    return out;
  }

  /// Hermite products ∏H_{m_j}(X(e_j)) of total degree ≤ max_degree, as I_k(e_α).
  [[nodiscard]] std::vector<std::pair<int, Element>> eigenbasis(int max_degree) const {
    std::vector<std::pair<int, Element>> out;
    out.emplace_back(0, Element(dimension_, 1.0));
    for (int k = 1; k <= max_degree; ++k) {
      for (const auto& t : sorted_tuples(dimension_, k)) {
        SymmetricKernel e(dimension_, k);
        e.add(t, 1.0);
        out.emplace_back(k, multiple_integral(e));
      }
    }
    return out;
  }

 private:
  std::size_t dimension_;
};

static_assert(DirichletStructure<WienerStructure>);

struct H1H2Certificate {
  int truncation_degree = 0;
  std::size_t basis_size = 0;
  std::size_t expected_basis_size = 0;
  double max_eigen_residual = 0.0;
  double max_gram_off_diagonal = 0.0;
  bool h1 = false;
  std::vector<int> h2_support;
  int lambda = 0;
  bool h2 = false;
};

/// Certifies (H1) on polynomials of degree ≤ 2λ and (H2) for X² where X ∈ Ker(L + λ).
/// Orthogonality of the basis is checked at `gram_tolerance`, which absorbs the
/// cancellation of monomial moments up to degree 4λ.
template <DirichletStructure S>
H1H2Certificate verify_h1_h2(const S& s, const typename S::Element& x, int lambda, double tolerance = 1e-9,
                             double gram_tolerance = 1e-7) {
  if (lambda < 0) throw DomainError("verify_h1_h2: eigenvalue must be nonnegative");
  const double scale = std::max(1.0, l2_norm(s, x));
  if (eigen_residual(s, x, lambda) > tolerance * scale)
    throw DomainError("verify_h1_h2: X is not an eigenfunction for the stated eigenvalue");

  H1H2Certificate cert;
  cert.lambda = lambda;
  cert.truncation_degree = std::max(1, 2 * lambda);
  const auto basis = s.eigenbasis(cert.truncation_degree);
  cert.basis_size = basis.size();
  cert.expected_basis_size =
      static_cast<std::size_t>(std::llround(binomial(static_cast<int>(s.dimension()) + cert.truncation_degree,
                                                     static_cast<int>(s.dimension()))));
  std::vector<double> norms;
  for (const auto& [p, phi] : basis) {
    const double n = l2_norm(s, phi);
    norms.push_back(n);
    cert.max_eigen_residual = std::max(cert.max_eigen_residual, eigen_residual(s, phi, p) / std::max(1.0, n));
  }
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      const double g = s.expectation(s.multiply(basis[i].second, basis[j].second)) / (norms[i] * norms[j]);
      cert.max_gram_off_diagonal = std::max(cert.max_gram_off_diagonal, std::abs(g));
    }
  cert.h1 = cert.basis_size == cert.expected_basis_size && cert.max_eigen_residual <= tolerance &&
            cert.max_gram_off_diagonal <= gram_tolerance;

  const auto square = s.multiply(x, x);
  const double square_scale = std::max(1.0, l2_norm(s, square));
  cert.h2 = true;
  for (const auto& [p, component] : s.eigen_project(square)) {
    if (l2_norm(s, component) <= tolerance * square_scale) continue;
    cert.h2_support.push_back(p);
    if (p > 2 * lambda) cert.h2 = false;
  }
  return cert;
}

}  // namespace chaos_forge
