#include <chaos_forge/fourth_moment.hpp>
#include <chaos_forge/laguerre_dirichlet.hpp>
#include <chaos_forge/random_corpus.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"

namespace cf = chaos_forge;
namespace oc = chaos_forge::oracle;

namespace {

cf::SymmetricKernel sym12() {
  cf::SymmetricKernel f(2, 2);
  f.add({0, 1}, 0.5);
  return f;
}

cf::SymmetricKernel e1_pow(int k, double scale) { return cf::SymmetricKernel::basis_power(1, 0, k) * scale; }

struct Triplet {
  double e4, var, rhs;
};

/// (E F⁴, Var(‖∇F‖²/k), (k−1)/(3k)(E F⁴ − 3)) straight from a polynomial via Wick pairings.
Triplet wick_triplet(const cf::Polynomial& f, int k) {
  const double e4 = oc::wick_expectation(f.pow(4));
  cf::Polynomial t(f.dimension());
  for (std::size_t i = 0; i < f.dimension(); ++i) t += f.derivative(i) * f.derivative(i);
  t *= 1.0 / k;
  const double m1 = oc::wick_expectation(t);
  const double var = oc::wick_expectation(t * t) - m1 * m1;
  return {e4, var, (k - 1.0) / (3.0 * k) * (e4 - 3.0)};
}

cf::Polynomial x(std::size_t d, std::size_t i) { return cf::Polynomial::variable(d, i); }

}  // namespace

TEST(WickOracle, PinnedTriplets) {
  const auto a = wick_triplet(x(2, 0) * x(2, 1), 2);
  EXPECT_NEAR(a.e4, 9.0, 1e-12);
  EXPECT_NEAR(a.var, 1.0, 1e-12);
  EXPECT_NEAR(a.rhs, 1.0, 1e-12);

  const auto b = wick_triplet(cf::hermite_polynomial(1, 0, 2) * (1.0 / std::sqrt(2.0)), 2);
  EXPECT_NEAR(b.e4, 15.0, 1e-12);
  EXPECT_NEAR(b.var, 2.0, 1e-12);
  EXPECT_NEAR(b.rhs, 2.0, 1e-12);

  const auto c = wick_triplet(cf::hermite_polynomial(1, 0, 3) * (1.0 / std::sqrt(6.0)), 3);
  EXPECT_NEAR(c.e4, 93.0, 1e-11);
  EXPECT_NEAR(c.var, 14.0, 1e-11);
  EXPECT_NEAR(c.rhs, 20.0, 1e-11);
}

TEST(Step1Variance, WorkedExamples) {
  std::mt19937_64 rng(1);
  const auto s1 = cf::step1_variance(cf::random_kernel(3, 1, rng), 1);
  EXPECT_EQ(s1.value, 0.0);
  EXPECT_TRUE(s1.terms.empty());

  const auto s2 = cf::step1_variance(sym12(), 2);
  ASSERT_EQ(s2.terms.size(), 1u);
  EXPECT_NEAR(s2.terms.at(1), 1.0, 1e-14);
  EXPECT_NEAR(cf::kernel_norm_sq(cf::sym_contract(sym12(), sym12(), 1)), 1.0 / 8.0, 1e-15);

  EXPECT_NEAR(cf::step1_variance(e1_pow(3, 1.0 / std::sqrt(6.0)), 3).value, 14.0, 1e-12);
  EXPECT_THROW(cf::step1_variance(sym12(), 3), cf::RangeError);
}

TEST(Step2Cumulant, WorkedExamples) {
  EXPECT_NEAR(cf::step2_cumulant(sym12(), 2).value, 6.0, 1e-13);
  EXPECT_NEAR(cf::step2_cumulant(e1_pow(3, 1.0 / std::sqrt(6.0)), 3).value, 90.0, 1e-11);
  EXPECT_EQ(cf::step2_cumulant(cf::SymmetricKernel::basis_power(2, 1, 1), 1).value, 0.0);
  EXPECT_THROW(cf::step2_cumulant(sym12(), 0), cf::RangeError);
}

TEST(Step2Cumulant, AlternativeSubscriptIsOutOfRange) {
  // A contraction of order 2k − 2r exceeds k whenever r < k/2, so only order r is well defined.
  const auto f = e1_pow(3, 1.0 / std::sqrt(6.0));
  EXPECT_THROW(cf::sym_contract(f, f, 2 * 3 - 2 * 1), cf::RangeError);
}

TEST(FundamentalInequality, PinnedExamples) {
  const auto a = cf::fundamental_inequality(sym12(), 2);
  EXPECT_NEAR(a.e_f4, 9.0, 1e-12);
  EXPECT_NEAR(a.var_stein_kernel, 1.0, 1e-12);
  EXPECT_NEAR(a.bound_rhs, 1.0, 1e-12);
  EXPECT_NEAR(a.margin, 0.0, 1e-12);
  EXPECT_NEAR(a.tv_bound, 2.0, 1e-12);

  const auto b = cf::fundamental_inequality(e1_pow(2, 1.0 / std::sqrt(2.0)), 2);
  EXPECT_NEAR(b.e_f4, 15.0, 1e-12);
  EXPECT_NEAR(b.var_stein_kernel, 2.0, 1e-12);
  EXPECT_NEAR(b.bound_rhs, 2.0, 1e-12);

  const auto c = cf::fundamental_inequality(e1_pow(3, 1.0 / std::sqrt(6.0)), 3);
  EXPECT_NEAR(c.e_f4, 93.0, 1e-11);
  EXPECT_NEAR(c.var_stein_kernel, 14.0, 1e-11);
  EXPECT_NEAR(c.bound_rhs, 20.0, 1e-11);
  EXPECT_NEAR(c.margin, 6.0, 1e-11);
  EXPECT_NEAR(c.e_f2_gamma, 93.0, 1e-10);
  EXPECT_TRUE(c.inequality_holds());

  EXPECT_THROW(cf::fundamental_inequality(sym12() * 2.0, 2), cf::NormalizationError);
  EXPECT_THROW(cf::fundamental_inequality(cf::SymmetricKernel::basis_power(1, 0, 1), 1), cf::RangeError);
}

TEST(FundamentalInequality, RandomCorpus) {
  std::mt19937_64 rng(2024);
  int count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 3;
    const std::size_t d = 1 + rng() % 4;
    const auto f = cf::unit_variance_kernel(cf::random_kernel(d, k, rng));
    const auto F = cf::multiple_integral(f);
    const auto rep = cf::fundamental_inequality(f, k);
    const double var = cf::variance(cf::stein_kernel_term(F));
    const double cum = cf::moment(F, 4) - 3.0;
    EXPECT_NEAR(rep.step1.value, var, 1e-9 * std::max(1.0, var));
    EXPECT_NEAR(rep.step2.value, cum, 1e-9 * std::max(1.0, cum));
    EXPECT_GE(rep.margin, -1e-9);
    if (k == 2) {
      EXPECT_NEAR(rep.margin, 0.0, 1e-9);
    }
    ++count;
  }
  EXPECT_EQ(count, 100);
}

TEST(DirichletBound, WienerExamples) {
  const cf::WienerStructure w2(2);
  const auto b = cf::dirichlet_fourth_moment_bound(w2, cf::multiple_integral(sym12()), 2);
  EXPECT_NEAR(b.var_gamma, 4.0, 1e-12);
  EXPECT_NEAR(b.rhs, 8.0, 1e-12);
  EXPECT_NEAR(b.tv_bound, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(b.e_gamma, 2.0, 1e-14);

  const cf::WienerStructure w1(1);
  const auto g = cf::dirichlet_fourth_moment_bound(w1, cf::multiple_integral(cf::SymmetricKernel::basis_power(1, 0, 1)), 1);
  EXPECT_NEAR(g.var_gamma, 0.0, 1e-15);
  EXPECT_NEAR(g.rhs, 0.0, 1e-14);

  EXPECT_THROW(cf::dirichlet_fourth_moment_bound(w2, cf::multiple_integral(sym12()), 1), cf::DomainError);
  EXPECT_THROW(cf::dirichlet_fourth_moment_bound(w2, cf::multiple_integral(sym12() * 2.0), 2),
               cf::NormalizationError);
}

TEST(DirichletBound, LaguerreExample) {
  const cf::LaguerreStructure s(1, 0.0);
  const auto x = cf::LaguerreElement::basis(1, 0.0, {1});
  const auto b = cf::dirichlet_fourth_moment_bound(s, x, 1);
  EXPECT_NEAR(b.e_x4, 9.0, 1e-12);
  EXPECT_NEAR(b.var_gamma, 1.0, 1e-12);
  EXPECT_NEAR(b.rhs, 2.0, 1e-12);
  EXPECT_NEAR(b.tv_bound, std::sqrt(2.0), 1e-12);
}

TEST(DirichletBound, WienerCorpusAgreesWithStepIdentities) {
  std::mt19937_64 rng(31);
  const cf::WienerStructure s(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + trial % 4;
    const auto f = cf::unit_variance_kernel(cf::random_kernel(3, k, rng));
    const auto b = cf::dirichlet_fourth_moment_bound(s, cf::multiple_integral(f), k);
    EXPECT_GE(b.margin, -1e-9);
    // Γ = k·⟨DF, −DL⁻¹F⟩ on the k-th chaos.
    if (k >= 2) {
      EXPECT_NEAR(b.var_gamma, k * k * cf::step1_variance(f, k).value, 1e-9 * std::max(1.0, b.var_gamma));
    }
  }
}

TEST(H1H2, WienerCertificates) {
  const cf::WienerStructure s(2);
  const auto cert = cf::verify_h1_h2(s, cf::multiple_integral(sym12()), 2);
  EXPECT_TRUE(cert.h1);
  EXPECT_EQ(cert.basis_size, 15u);
  EXPECT_TRUE(cert.h2);
  EXPECT_EQ(cert.h2_support, (std::vector<int>{0, 2, 4}));

  const auto c0 = cf::verify_h1_h2(s, cf::ChaosElement(2, 3.0), 0);
  EXPECT_TRUE(c0.h2);
  EXPECT_EQ(c0.h2_support, (std::vector<int>{0}));

  EXPECT_THROW(cf::verify_h1_h2(s, cf::multiple_integral(sym12()) + cf::ChaosElement(2, 1.0), 2), cf::DomainError);
}
