// Walks through the fourth-moment bound on a few chaos elements and prints the
// Stein kernel variance, the fourth cumulant and the resulting total-variation bound.

#include <chaos_forge/fourth_moment.hpp>
#include <chaos_forge/random_corpus.hpp>
#include <chaos_forge/stein_normal.hpp>
#include <chaos_forge/wiener_chaos.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace cf = chaos_forge;

namespace {

void show(const std::string& label, const cf::SymmetricKernel& f, int k) {
  const auto r = cf::fundamental_inequality(f, k);
  std::printf("%-28s k=%d  E F^4=%9.4f  Var<DF,-DL^-1 F>=%8.4f  bound=%8.4f  margin=%9.2e  d_TV<=%7.4f\n",
              label.c_str(), k, r.e_f4, r.var_stein_kernel, r.bound_rhs, r.margin, r.tv_bound);
}

}  // namespace

int main() {
  cf::SymmetricKernel x1x2(2, 2);
  x1x2.add({0, 1}, 0.5);
  show("x1*x2", x1x2, 2);
  show("H2(Z)/sqrt(2)", cf::SymmetricKernel::basis_power(1, 0, 2) * (1.0 / std::sqrt(2.0)), 2);
  show("H3(Z)/sqrt(6)", cf::SymmetricKernel::basis_power(1, 0, 3) * (1.0 / std::sqrt(6.0)), 3);

  // Spreading a second-chaos kernel over more coordinates drives E F^4 toward 3.
  for (std::size_t d : {4u, 16u, 64u}) {
    cf::SymmetricKernel f(d, 2);
    for (std::size_t i = 0; i < d; ++i) f.add({static_cast<int>(i), static_cast<int>(i)}, 1.0);
    show("sum (Z_i^2 - 1), d=" + std::to_string(d), cf::unit_variance_kernel(f), 2);
  }

  auto rng = cf::make_engine(7);
  for (int k = 2; k <= 4; ++k) show("random kernel, d=3", cf::unit_variance_kernel(cf::random_kernel(3, k, rng)), k);

  // A sampled second-chaos element against the exact bound.
  cf::SymmetricKernel f(32, 2);
  for (int i = 0; i < 32; ++i) f.add({i, i}, 1.0);
  const auto F = cf::multiple_integral(cf::unit_variance_kernel(f));
  const auto xs = cf::sample(F, 20000, 11);
  const auto bound = cf::fundamental_inequality(cf::unit_variance_kernel(f), 2).tv_bound;
  const auto rep = cf::distance_report(xs, bound);
  std::printf("\nsampled sum (Z_i^2 - 1), d=32: Kolmogorov %.4f, Wasserstein %.4f, TV bound %.4f, DKW %.4f\n",
              rep.kolmogorov, rep.wasserstein, rep.tv_upper_bound, rep.monte_carlo_error);
  return 0;
}
