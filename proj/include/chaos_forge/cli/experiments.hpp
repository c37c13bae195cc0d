#pragma once

// Experiment suites behind the command-line runner. Each case draws from its
// own substream make_engine(seed, case_index), so records do not depend on the
// number of worker threads.

#include <chaos_forge/cli/config.hpp>
#include <chaos_forge/cli/report.hpp>
#include <chaos_forge/dirichlet_structure.hpp>
#include <chaos_forge/fbm_breuer_major.hpp>
#include <chaos_forge/fourth_moment.hpp>
#include <chaos_forge/laguerre_dirichlet.hpp>
#include <chaos_forge/malliavin_ops.hpp>
#include <chaos_forge/random_corpus.hpp>
#include <chaos_forge/stein_normal.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace chaos_forge::cli {

/// A module error raised while running one case, prefixed with the case identifier.
class CaseError : public std::runtime_error {
 public:
  CaseError(std::size_t index, const std::string& what)
      : std::runtime_error("case " + std::to_string(index) + ": " + what), index_(index) {}

  [[nodiscard]] std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Runs body(i) for i in [0, count) on up to `jobs` threads. The first failing
/// index (lowest, not earliest) is rethrown as a CaseError.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  std::vector<std::string> errors(count);
  std::vector<char> failed(count, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        failed[i] = 1;
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < count; ++i)
    if (failed[i]) throw CaseError(i, errors[i]);
}

namespace detail {

/// One row per (case, check) with lhs ≤ rhs as the checked relation.
struct CheckRow {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  [[nodiscard]] double margin() const { return rhs - lhs; }
};

inline void add_min_margin_assertions(RunReport& report, const std::map<std::string, double>& min_margin,
                                      double floor = 0.0) {
  for (const auto& [check, m] : min_margin) report.assertions.push_back({"min margin " + check, m, floor, true});
}

inline double expected_rate_slope(double H) {
  if (H <= 0.625) return -0.5;
  return 4.0 * H - 3.0;
}

}  // namespace detail

inline RunReport run_fourth_moment_corpus(const ExperimentConfig& c, unsigned jobs) {
  RunReport r;
  r.columns = {"case", "k", "d", "e_f4", "var_stein_kernel", "step1", "step2", "bound_rhs", "margin", "tv_bound",
               "pass"};
  std::vector<FourthMomentReport> results(c.count);
  parallel_for(c.count, jobs, [&](std::size_t i) {
    const int k = c.k[i % c.k.size()];
    auto rng = make_engine(c.seed, i);
    results[i] = fundamental_inequality(unit_variance_kernel(random_kernel(c.d, k, rng)), k);
  });
  double min_margin = std::numeric_limits<double>::infinity();
  double max_k2 = 0.0;
  bool any_k2 = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& f = results[i];
    const bool pass = f.margin >= -1e-9 && (f.k != 2 || std::abs(f.margin) <= 1e-9);
    r.rows.push_back({static_cast<long long>(i), static_cast<long long>(f.k), static_cast<long long>(c.d), f.e_f4,
                      f.var_stein_kernel, f.step1.value, f.step2.value, f.bound_rhs, f.margin, f.tv_bound, pass});
    min_margin = std::min(min_margin, f.margin);
    if (f.k == 2) {
      any_k2 = true;
      max_k2 = std::max(max_k2, std::abs(f.margin));
    }
  }
  r.assertions.push_back({"min fourth-moment margin", min_margin, -1e-9, true});
  if (any_k2) r.assertions.push_back({"max |margin| at k=2", max_k2, 1e-9, false});
  return r;
}

inline RunReport run_fbm_rates(const ExperimentConfig& c, unsigned jobs) {
  RunReport r;
  r.columns = {"H", "n", "sigma", "var_exact", "tv_bound", "slope_fit"};
  const std::size_t m = c.n.size();
  const std::size_t cases = c.H.size() * m;
  std::vector<QuadraticVariationStatistic> stats(cases);
  parallel_for(cases, jobs, [&](std::size_t i) { stats[i] = exact_tv_bound(c.H[i / m], c.n[i % m]); });

  std::vector<MonteCarloResult> mc(c.samples > 0 ? cases : 0);
  if (c.samples > 0)
    parallel_for(cases, jobs, [&](std::size_t i) {
      mc[i] = monte_carlo_distance(c.H[i / m], c.n[i % m], c.samples, c.seed, i);
    });

  for (std::size_t h = 0; h < c.H.size(); ++h) {
    const double H = c.H[h];
    std::vector<double> tvs;
    for (std::size_t j = 0; j < m; ++j) tvs.push_back(stats[h * m + j].tv_bound);
    const auto fit = fit_rate(H, c.n, tvs);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& q = stats[h * m + j];
      r.rows.push_back({H, static_cast<long long>(q.n), q.sigma, q.var_exact, q.tv_bound, fit.slope});
    }
    const std::string tag = "H=" + format_label(H);
    double worst_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < m; ++j) worst_increase = std::max(worst_increase, tvs[j] - tvs[j - 1]);
    r.assertions.push_back({tag + " tv_bound decreasing (max step)", worst_increase, 0.0, false});
    if (H == 0.75) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double v = tvs[j] * std::log(static_cast<double>(c.n[j]));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      r.assertions.push_back({tag + " tv_bound*log(n) max/min ratio", hi / lo, 2.0, false});
    } else {
      r.assertions.push_back(
          {tag + " |slope - " + format_label(detail::expected_rate_slope(H)) + "|",
           std::abs(fit.slope - detail::expected_rate_slope(H)), 0.15, false});
    }
    if (H == 0.5) {
      double err = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        err = std::max(err, std::abs(tvs[j] - 2.0 * std::sqrt(2.0 / static_cast<double>(c.n[j]))));
      r.assertions.push_back({tag + " |tv_bound - 2*sqrt(2/n)|", err, 1e-12, false});
    }
    if (c.samples > 0)
      for (std::size_t j = 0; j < m; ++j) {
        const auto& res = mc[h * m + j];
        r.assertions.push_back({tag + " n=" + std::to_string(c.n[j]) + " kolmogorov vs tv_bound+3*dkw",
                                res.distances.kolmogorov, res.distances.tv_upper_bound + 3.0 * res.distances.monte_carlo_error,
                                false});
      }
  }
  return r;
}

inline RunReport run_stein_bounds(const ExperimentConfig&, unsigned jobs) {
  RunReport r;
  r.columns = {"function", "class", "bound", "lhs", "rhs", "margin", "pass"};
  std::vector<TestFunction> functions;
  for (TestClass cls : {TestClass::bounded, TestClass::absolutely_continuous, TestClass::indicator})
    for (auto& f : shipped_test_functions(cls)) functions.push_back(std::move(f));
  std::vector<SteinCertificate> certs(functions.size());
  parallel_for(functions.size(), jobs,
               [&](std::size_t i) { certs[i] = verify_solution_bounds(SteinSolution(functions[i])); });
  std::map<std::string, double> min_margin;
  for (const auto& cert : certs)
    for (const auto& ch : cert.checks) {
      r.rows.push_back({cert.function, std::string(to_string(cert.cls)), ch.bound, ch.lhs, ch.rhs, ch.margin, ch.pass});
      auto [it, inserted] = min_margin.try_emplace(ch.bound, ch.margin);
      if (!inserted) it->second = std::min(it->second, ch.margin);
    }
  detail::add_min_margin_assertions(r, min_margin, -GridSpec{}.slack);
  return r;
}

inline RunReport run_laguerre_suite(const ExperimentConfig& c, unsigned jobs) {
  RunReport r;
  r.columns = {"case", "nu", "d", "degree", "check", "lhs", "rhs", "margin", "pass"};
  struct Task {
    double nu;
    std::size_t d;
    int degree;
    bool eigen;
  };
  std::vector<Task> tasks;
  for (double nu : c.nu)
    for (std::size_t i = 0; i < c.count; ++i) tasks.push_back({nu, 1 + i % c.d, c.degree, false});
  for (double nu : c.nu)
    for (std::size_t d = 1; d <= c.d; ++d)
      for (int p = 1; p <= c.degree; ++p) tasks.push_back({nu, d, p, true});
  const bool pinned = std::find(c.nu.begin(), c.nu.end(), 0.0) != c.nu.end();
  if (pinned) tasks.push_back({0.0, 1, 1, true});

  std::vector<std::vector<detail::CheckRow>> rows(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    const LaguerreStructure s(t.d, t.nu);
    auto rng = make_engine(c.seed, i);
    auto& out = rows[i];
    if (!t.eigen) {
      const auto a = random_laguerre_element(t.d, t.nu, t.degree, rng);
      const auto b = random_laguerre_element(t.d, t.nu, t.degree, rng);
      const double eg = s.expectation(s.carre_du_champ(a, b));
      const double tol = 1e-9 * std::max(1.0, std::abs(eg));
      out.push_back({"integration by parts (a, Lb)", std::abs(eg + s.expectation(s.multiply(a, s.generator(b)))), tol});
      out.push_back({"integration by parts (b, La)", std::abs(eg + s.expectation(s.multiply(b, s.generator(a)))), tol});
      return;
    }
    const bool is_pinned = pinned && i + 1 == tasks.size();
    const auto x = is_pinned ? LaguerreElement::basis(1, 0.0, {1}) : random_laguerre_eigenfunction(s, t.degree, rng);
    const auto cert = verify_h1_h2(s, x, t.degree);
    const auto b = dirichlet_fourth_moment_bound(s, x, t.degree);
    if (is_pinned) {
      out.push_back({"pinned |var_gamma - 1|", std::abs(b.var_gamma - 1.0), 1e-12});
      out.push_back({"pinned |rhs - 2|", std::abs(b.rhs - 2.0), 1e-12});
      return;
    }
    out.push_back({"h1 basis size deficit",
                   std::abs(static_cast<double>(cert.basis_size) - static_cast<double>(cert.expected_basis_size)), 0.0});
    out.push_back({"h1 eigen residual", cert.max_eigen_residual, 1e-9});
    out.push_back({"h1 gram off-diagonal", cert.max_gram_off_diagonal, 1e-7});
    out.push_back({"h2 max support", static_cast<double>(cert.h2_support.empty() ? 0 : cert.h2_support.back()),
                   2.0 * t.degree});
    out.push_back({"fourth moment var_gamma vs rhs", b.var_gamma, b.rhs + 1e-9});
  });

  std::map<std::string, double> min_margin;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    for (const auto& row : rows[i]) {
      r.rows.push_back({static_cast<long long>(i), tasks[i].nu, static_cast<long long>(tasks[i].d),
                        static_cast<long long>(tasks[i].degree), row.check, row.lhs, row.rhs, row.margin(),
                        row.margin() >= 0.0});
      auto [it, inserted] = min_margin.try_emplace(row.check, row.margin());
      if (!inserted) it->second = std::min(it->second, row.margin());
    }
  detail::add_min_margin_assertions(r, min_margin);
  return r;
}

inline RunReport run_duality_suite(const ExperimentConfig& c, unsigned jobs) {
  RunReport r;
  r.columns = {"case", "d", "degree", "check", "lhs", "rhs", "margin", "pass"};
  std::vector<std::vector<detail::CheckRow>> rows(c.count);
  parallel_for(c.count, jobs, [&](std::size_t i) {
    const std::size_t d = 1 + i % c.d;
    auto rng = make_engine(c.seed, i);
    const auto f = random_chaos_element(d, c.degree, rng);
    const auto g = random_chaos_element(d, c.degree, rng);
    auto& out = rows[i];
    out.push_back({"duality E[F delta DG] - E<DF, DG>", std::abs(duality_check(f, derivative(g))), 1e-9});

    const auto p = to_polynomial(f);
    const auto df = derivative(f);
    double chain = 0.0;
    for (std::size_t x = 0; x < d; ++x)
      chain = std::max(chain, max_abs_difference(to_polynomial(df.components[x]), p.derivative(x)));
    out.push_back({"chain rule DF vs partial derivatives", chain, 1e-10});

    const auto lhs = gamma(f, g) * 2.0;
    const auto rhs =
        ou_generator(chaos_product(f, g)) - chaos_product(f, ou_generator(g)) - chaos_product(g, ou_generator(f));
    out.push_back({"2 Gamma[F,G] = L(FG) - F LG - G LF", max_abs_difference(lhs, rhs), 1e-10});
  });
  std::map<std::string, double> min_margin;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& row : rows[i]) {
      r.rows.push_back({static_cast<long long>(i), static_cast<long long>(1 + i % c.d),
                        static_cast<long long>(c.degree), row.check, row.lhs, row.rhs, row.margin(),
                        row.margin() >= 0.0});
      auto [it, inserted] = min_margin.try_emplace(row.check, row.margin());
      if (!inserted) it->second = std::min(it->second, row.margin());
    }
  detail::add_min_margin_assertions(r, min_margin);
  return r;
}

/// Runs the configured suite and stamps config echo, version and wall-clock time.
inline RunReport run_experiment(const ExperimentConfig& c, unsigned jobs = 1) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  switch (c.experiment) {
    case ExperimentKind::fourth_moment_corpus: r = run_fourth_moment_corpus(c, jobs); break;
    case ExperimentKind::fbm_rates: r = run_fbm_rates(c, jobs); break;
    case ExperimentKind::stein_bounds: r = run_stein_bounds(c, jobs); break;
    case ExperimentKind::laguerre_suite: r = run_laguerre_suite(c, jobs); break;
    case ExperimentKind::duality_suite: r = run_duality_suite(c, jobs); break;
  }
  r.experiment = to_string(c.experiment);
  r.config = config_echo(c);
  r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace chaos_forge::cli
