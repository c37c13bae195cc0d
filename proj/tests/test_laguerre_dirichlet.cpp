#include <chaos_forge/fourth_moment.hpp>
#include <chaos_forge/laguerre_dirichlet.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"

namespace cf = chaos_forge;
namespace oc = chaos_forge::oracle;

namespace {

cf::Polynomial x(std::size_t d, std::size_t i) { return cf::Polynomial::variable(d, i); }

cf::LaguerreElement random_element(std::size_t d, double nu, int max_degree, std::mt19937_64& rng) {
  return cf::random_laguerre_element(d, nu, max_degree, rng);
}

double coeff_diff(const cf::LaguerreElement& a, const cf::LaguerreElement& b) {
  return cf::max_abs_difference(cf::to_polynomial(a), cf::to_polynomial(b));
}

}  // namespace

TEST(LaguerreElement, BasisAgreesWithRodriguesOracle) {
  for (double nu : {0.0, 0.5, 2.0, -0.5}) {
    for (int n = 0; n <= 6; ++n) {
      const auto p = cf::to_polynomial(cf::LaguerreElement::basis(1, nu, {n}));
      const auto ref = oc::laguerre_rodrigues(n, nu);
      for (int j = 0; j <= n; ++j) EXPECT_NEAR(p.coefficient({j}), ref[static_cast<std::size_t>(j)], 1e-11);
    }
  }
}

TEST(LaguerreElement, MonomialRoundTripAndPointwiseAgreement) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pt(0.0, 6.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng() % 3;
    const double nu = std::vector<double>{0.0, 0.5, 2.0}[trial % 3];
    const auto e = random_element(d, nu, 3, rng);
    const auto back = cf::laguerre_from_polynomial(cf::to_polynomial(e), nu);
    EXPECT_LT(coeff_diff(back, e), 1e-11);
    for (const auto& [i, c] : e.coefficients()) EXPECT_NEAR(back.coefficient(i), c, 1e-11);

    const auto poly = cf::to_polynomial(e);
    for (int k = 0; k < 5; ++k) {
      std::vector<double> z(d);
      for (double& v : z) v = pt(rng);
      double direct = 0.0;
      for (const auto& [i, c] : e.coefficients()) {
        double term = c;
        for (std::size_t j = 0; j < d; ++j) term *= cf::laguerre_eval(i[j], nu, z[j]);
        direct += term;
      }
      EXPECT_NEAR(poly.evaluate(z), direct, 1e-9 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST(LaguerreGenerator, WorkedExamples) {
  for (double nu : {0.0, 0.5, 2.0}) {
    const auto l1 = cf::LaguerreElement::basis(1, nu, {1});
    EXPECT_LT(coeff_diff(cf::laguerre_generator(l1), l1 * -1.0), 1e-13);
    EXPECT_NEAR(cf::to_polynomial(l1).coefficient({0}), nu + 1.0, 1e-15);

    EXPECT_TRUE(cf::laguerre_generator(cf::LaguerreElement::constant(2, nu, 4.0)).is_zero());

    const auto prod = cf::LaguerreElement::basis(2, nu, {1, 1});
    EXPECT_LT(coeff_diff(cf::laguerre_generator(prod), prod * -2.0), 1e-12);
  }
}

TEST(LaguerreGenerator, EveryBasisElementIsAnEigenfunction) {
  for (double nu : {0.0, 0.5, 2.0}) {
    const cf::LaguerreStructure s(3, nu);
    for (const auto& [p, phi] : s.eigenbasis(4)) {
      const auto lphi = cf::laguerre_generator(phi);
      EXPECT_LT(coeff_diff(lphi, phi * static_cast<double>(-p)), 1e-9);
    }
  }
}

TEST(LaguerreGamma, WorkedExamples) {
  for (double nu : {0.0, 0.5, 2.0}) {
    const auto l1 = cf::LaguerreElement::basis(1, nu, {1});
    EXPECT_LT(cf::max_abs_difference(cf::to_polynomial(cf::laguerre_gamma(l1, l1)), x(1, 0)), 1e-13);
    EXPECT_TRUE(cf::laguerre_gamma(cf::LaguerreElement::constant(1, nu, 2.0), l1).is_zero());
  }
  const auto l2 = cf::LaguerreElement::basis(1, 0.0, {2});
  const auto expected = x(1, 0) * (x(1, 0) - cf::Polynomial::constant(1, 2.0)).pow(2);
  EXPECT_LT(cf::max_abs_difference(cf::to_polynomial(cf::laguerre_gamma(l2, l2)), expected), 1e-12);
}

TEST(LaguerreGamma, BilinearSymmetricNonnegative) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pt(0.0, 8.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng() % 3;
    const double nu = std::vector<double>{0.0, 0.5, 2.0}[trial % 3];
    const auto a = random_element(d, nu, 3, rng);
    const auto b = random_element(d, nu, 3, rng);
    const auto c = random_element(d, nu, 2, rng);
    EXPECT_LT(coeff_diff(cf::laguerre_gamma(a, b), cf::laguerre_gamma(b, a)), 1e-10);
    EXPECT_LT(coeff_diff(cf::laguerre_gamma(a * 2.0 + c, b),
                         cf::laguerre_gamma(a, b) * 2.0 + cf::laguerre_gamma(c, b)),
              1e-9);
    const auto gaa = cf::to_polynomial(cf::laguerre_gamma(a, a));
    for (int k = 0; k < 20; ++k) {
      std::vector<double> z(d);
      for (double& v : z) v = pt(rng);
      EXPECT_GE(gaa.evaluate(z), -1e-10);
    }
  }
}

TEST(LaguerreGamma, IntegrationByParts) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng() % 3;
    const double nu = std::vector<double>{0.0, 0.5, 2.0}[trial % 3];
    const cf::LaguerreStructure s(d, nu);
    const auto a = random_element(d, nu, 3, rng);
    const auto b = random_element(d, nu, 3, rng);
    const double eg = s.expectation(s.carre_du_champ(a, b));
    EXPECT_NEAR(eg + s.expectation(s.multiply(a, s.generator(b))), 0.0, 1e-9 * std::max(1.0, std::abs(eg)));
    EXPECT_NEAR(eg + s.expectation(s.multiply(b, s.generator(a))), 0.0, 1e-9 * std::max(1.0, std::abs(eg)));
  }
}

TEST(LaguerreGamma, FunctionalCalculus) {
  // Γ[F(X), G(Y)] = F′(X)·G′(Y)·Γ[X, Y] with F(t) = t² − t, G(t) = t³.
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + rng() % 2;
    const double nu = std::vector<double>{0.0, 0.5, 2.0}[trial % 3];
    const auto a = random_element(d, nu, 2, rng);
    const auto b = random_element(d, nu, 1, rng);
    const auto pa = cf::to_polynomial(a);
    const auto pb = cf::to_polynomial(b);
    const auto fa = cf::laguerre_from_polynomial(pa * pa - pa, nu);
    const auto gb = cf::laguerre_from_polynomial(pb.pow(3), nu);
    const auto lhs = cf::to_polynomial(cf::laguerre_gamma(fa, gb));
    const auto rhs = (pa * 2.0 - cf::Polynomial::constant(d, 1.0)) * (pb * pb * 3.0) *
                     cf::to_polynomial(cf::laguerre_gamma(a, b));
    double scale = 1.0;
    for (const auto& [m, c] : rhs.terms()) scale = std::max(scale, std::abs(c));
    EXPECT_LT(cf::max_abs_difference(lhs, rhs), 1e-9 * scale);
  }
}

TEST(LaguerreStructure, ExpectationMatchesConstantCoefficient) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + rng() % 3;
    const double nu = std::vector<double>{0.0, 0.5, 2.0}[trial % 3];
    const cf::LaguerreStructure s(d, nu);
    const auto a = random_element(d, nu, 3, rng);
    EXPECT_NEAR(s.expectation(a), a.coefficient(cf::MultiIndex(d, 0)), 1e-10);
  }
  EXPECT_NEAR(cf::gamma_expectation((cf::Polynomial::constant(1, 1.0) - x(1, 0)).pow(4), 1.0), 9.0, 1e-12);
  EXPECT_THROW(cf::LaguerreStructure(1, -1.0), cf::DomainError);
  EXPECT_THROW(cf::LaguerreElement(1, 0.0) + cf::LaguerreElement(1, 0.5), cf::DomainError);
}

TEST(EigenProject, WorkedExamples) {
  const auto xe = cf::laguerre_from_polynomial(x(1, 0), 0.0);
  const auto parts = cf::eigen_project(xe);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_NEAR(parts.at(0).coefficient({0}), 1.0, 1e-14);
  EXPECT_NEAR(parts.at(1).coefficient({1}), -1.0, 1e-14);

  const auto phi = cf::LaguerreElement::basis(2, 0.5, {1, 2}) * 3.0;
  EXPECT_EQ(cf::eigen_project(phi).size(), 1u);

  const auto sq = cf::laguerre_from_polynomial((cf::Polynomial::constant(1, 1.0) - x(1, 0)).pow(2), 0.0);
  const auto sq_parts = cf::eigen_project(sq);
  for (const auto& [p, comp] : sq_parts) {
    EXPECT_LE(p, 2);
    EXPECT_LT(coeff_diff(cf::laguerre_generator(comp), comp * static_cast<double>(-p)), 1e-12);
  }
}

TEST(H1H2, LaguerreEigenfunctionsOfDegreeAtMostThree) {
  std::mt19937_64 rng(10);
  for (double nu : {0.0, 0.5, 2.0}) {
    for (std::size_t d = 1; d <= 3; ++d) {
      const cf::LaguerreStructure s(d, nu);
      for (int p = 1; p <= 3; ++p) {
        const auto xe = cf::random_laguerre_eigenfunction(s, p, rng);
        const auto cert = cf::verify_h1_h2(s, xe, p);
        EXPECT_TRUE(cert.h1) << "d=" << d << " p=" << p;
        EXPECT_EQ(cert.basis_size, cert.expected_basis_size);
        EXPECT_TRUE(cert.h2);
        EXPECT_LE(cert.h2_support.back(), 2 * p);
        const auto b = cf::dirichlet_fourth_moment_bound(s, xe, p);
        EXPECT_GE(b.margin, -1e-9) << "nu=" << nu << " d=" << d << " p=" << p;
        EXPECT_NEAR(b.e_gamma, p, 1e-9);
      }
    }
  }
  const cf::LaguerreStructure s(1, 0.0);
  EXPECT_EQ(cf::verify_h1_h2(s, cf::LaguerreElement::constant(1, 0.0, 2.0), 0).h2_support, (std::vector<int>{0}));
}
