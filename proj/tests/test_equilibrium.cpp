#include <doctest.h>

#include <cmath>

#include "loggas/classical.hpp"
#include "loggas/equilibrium.hpp"
#include "loggas/rng.hpp"
#include "oracles.hpp"

using namespace loggas;

namespace {
const Rectangle kInterval = Rectangle::interval(-1, 1);

double bin_mass(const GridMeasure& m, double lo, double hi) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.nodes()[i].real() >= lo && m.nodes()[i].real() < hi) acc += m.masses()[i];
  return acc;
}
}  // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("atomic measures have free entropy -inf in literal mode") {
  GridMeasure two({{0, 0}, {1, 0}}, {0.5, 0.5});
  CHECK(free_entropy(two) == -std::numeric_limits<double>::infinity());
  CHECK(weighted_energy(two, WeightFunction::unit(Rectangle::interval(-1, 2))).weighted_energy ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("discretized arcsine entropy hits the classical interval value") {
  // capacity of [-1,1] is 1/2, so Sigma(arcsine) = log(1/2)
  const double sigma = free_entropy(arcsine_measure(1024));
  CHECK(sigma == doctest::Approx(-std::log(2.0)).epsilon(0.01));
  // grid refinement is Cauchy: successive gaps shrink
  const double s128 = free_entropy(arcsine_measure(128));
  const double s256 = free_entropy(arcsine_measure(256));
  const double s512 = free_entropy(arcsine_measure(512));
  CHECK(std::fabs(s256 - s128) > std::fabs(s512 - s256));
  CHECK(std::fabs(free_entropy(arcsine_measure(2048)) - sigma) < 1e-3);
}

TEST_CASE("push-forward scaling shifts the entropy by log s") {
  const double base = free_entropy(arcsine_measure(1024));
  const double scaled = free_entropy(scaled_arcsine_measure(1024, 0.5));
  CHECK(scaled - base == doctest::Approx(std::log(0.5)).epsilon(0.01));
}

TEST_CASE("energy report identity and unit-weight reduction") {
  const auto m = arcsine_measure(512);
  const auto unit = weighted_energy(m, WeightFunction::unit(kInterval));
  CHECK(unit.weighted_energy == doctest::Approx(-unit.sigma).epsilon(1e-14));
  CHECK(unit.external_term == 0.0);

  const auto w = WeightFunction::exp_poly(kInterval, {{2, 0, 1.0}});
  const auto rep = weighted_energy(m, w);
  CHECK(rep.weighted_energy == doctest::Approx(-rep.sigma + rep.external_term).epsilon(1e-10));
  // external term = 2 * second moment for Q = x^2
  CHECK(rep.external_term ==
        doctest::Approx(2.0 * moments(m, 2).at(2, 0)).epsilon(1e-12));
  CHECK(rep.log_delta_w == doctest::Approx(-rep.weighted_energy));
}

TEST_CASE("2-D cell self-energy scales like log s and matches a direct estimate") {
  const double c = cell_self_energy(0.01, 0.02);
  const double cs = cell_self_energy(0.005, 0.01);
  CHECK(cs - c == doctest::Approx(std::log(0.5)).epsilon(1e-9));
  // independent midpoint estimate of the mean log distance over one cell pair
  const int n = 24;
  double acc = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        for (int d = 0; d < n; ++d) {
          const double dx = 0.01 * (a - cc) / n, dy = 0.02 * (b - d + 0.5) / n;
          acc += 0.5 * std::log(dx * dx + dy * dy);
        }
  acc /= static_cast<double>(n) * n * n * n;
  CHECK(c == doctest::Approx(acc).epsilon(5e-3));
}

TEST_CASE("unweighted equilibrium on the interval is the arcsine law") {
  EqDiagnostics diag;
  const auto eq = solve_equilibrium(kInterval, WeightFunction::unit(kInterval), 512, {}, &diag);
  CHECK(diag.converged);
  CHECK(eq.converged());
  CHECK(diag.objective_monotone);
  CHECK(diag.kernel_lambda_max < 0.0);  // convex discretization, reported not assumed
  for (double m : eq.masses()) CHECK(m >= 0.0);
  double total = 0.0;
  for (double m : eq.masses()) total += m;
  CHECK(std::fabs(total - 1.0) <= 1e-12);

  // width-0.1 bins against the arcsine CDF (the [-1,-0.9] bin is 0.1436)
  CHECK(arcsine_cdf(-0.9) - arcsine_cdf(-1.0) == doctest::Approx(0.1436).epsilon(1e-3));
  for (int b = 0; b < 20; ++b) {
    const double lo = -1.0 + 0.1 * b, hi = lo + 0.1;
    CHECK(std::fabs(bin_mass(eq, lo, hi) - (arcsine_cdf(hi) - arcsine_cdf(lo))) < 0.01);
  }
  // classical interval energy log 2 (the capacity of [-1,1] is 1/2)
  const auto rep = weighted_energy(eq, WeightFunction::unit(kInterval));
  CHECK(rep.weighted_energy == doctest::Approx(std::log(2.0)).epsilon(0.01));
}

TEST_CASE("gaussian field on [-2,2]: semicircle law from the stationarity condition") {
  // For Q = x^2 the stationarity (singular-integral) condition gives the
  // semicircle on [-1,1]: PV int dmu/(x-y) = 2x forces support radius 1.
  const auto big = Rectangle::interval(-2, 2);
  const auto w = WeightFunction::exp_poly(big, {{2, 0, 1.0}});
  EqDiagnostics diag;
  const auto eq = solve_equilibrium(big, w, 512, {}, &diag);
  CHECK(diag.converged);
  // support strictly inside the domain and symmetric
  CHECK(bin_mass(eq, -2.0, -1.05) + bin_mass(eq, 1.05, 2.01) < 1e-10);
  for (int b = 0; b < 20; ++b) {
    const double lo = -1.0 + 0.1 * b, hi = lo + 0.1;
    const double tgt = semicircle_cdf(hi) - semicircle_cdf(lo);
    CHECK(std::fabs(bin_mass(eq, lo, hi) - tgt) < 0.01);
  }
  double asym = 0.0;
  for (int b = 0; b < 10; ++b) {
    const double lo = 0.1 * b;
    asym = std::max(asym, std::fabs(bin_mass(eq, lo, lo + 0.1) - bin_mass(eq, -lo - 0.1, -lo)));
  }
  CHECK(asym < 1e-6);
  // I_w(mu_eq) = 3/4 + log 2 for this field (potential of the semicircle)
  CHECK(weighted_energy(eq, w).weighted_energy ==
        doctest::Approx(0.75 + std::log(2.0)).epsilon(0.01));
}

TEST_CASE("objective is independent of the starting simplex point") {
  EqDiagnostics d1, d2;
  EqOptions o1, o2;
  const auto e1 = solve_equilibrium(kInterval, WeightFunction::unit(kInterval), 256, o1, &d1);
  o2.init.assign(256, 0.0);
  Rng rng(3);
  double tot = 0.0;
  for (auto& v : o2.init) tot += (v = rng.uniform());
  for (auto& v : o2.init) v /= tot;
  const auto e2 = solve_equilibrium(kInterval, WeightFunction::unit(kInterval), 256, o2, &d2);
  CHECK(d1.converged);
  CHECK(d2.converged);
  CHECK(d1.objective == doctest::Approx(d2.objective).epsilon(1e-8));
}

TEST_CASE("iteration cap flags non-convergence") {
  EqDiagnostics diag;
  EqOptions opts;
  opts.max_iters = 3;
  const auto eq = solve_equilibrium(kInterval, WeightFunction::unit(kInterval), 64, opts, &diag);
  CHECK(!diag.converged);
  CHECK(!eq.converged());
}

TEST_CASE("rate functional: zero at the equilibrium, positive off it") {
  clear_equilibrium_cache();
  const auto unit = WeightFunction::unit(kInterval);
  const auto eq = solve_equilibrium(kInterval, unit, 512);
  CHECK(rate_functional(eq, unit, kInterval, 512) <= 1e-8);

  // move 5% of the mass onto the last node
  auto masses = eq.masses();
  double moved = 0.0;
  for (std::size_t i = 0; i < masses.size() - 1; ++i) {
    const double take = 0.05 * masses[i];
    masses[i] -= take;
    moved += take;
  }
  masses.back() += moved;
  GridMeasure perturbed(eq.nodes(), masses, "perturbed");
  perturbed.set_cell_self_energy(eq.cell_self_energy());
  CHECK(rate_functional(perturbed, unit, kInterval, 512) > 0.0);
}

TEST_CASE("rate of the uniform measure matches the quadrature oracle") {
  // I(uniform) = -Sigma(uniform) + Sigma(arcsine); the oracle integrates
  // log|x-y| over the square directly (closed form log 2 - 3/2)
  const double sigma_unif = oracles::uniform_entropy_quadrature(-1.0, 1.0);
  CHECK(sigma_unif == doctest::Approx(std::log(2.0) - 1.5).epsilon(1e-3));
  const double expected = -sigma_unif - std::log(2.0);
  const auto uniform = grid_measure_from_density(kInterval, 1024, [](complexd) { return 1.0; },
                                                 "uniform");
  const double got = rate_functional(uniform, WeightFunction::unit(kInterval), kInterval, 512);
  CHECK(got == doctest::Approx(expected).epsilon(0.01));
  // detail carries the convergence flag
  CHECK(rate_functional_detail(uniform, WeightFunction::unit(kInterval), kInterval, 512)
            .equilibrium_converged);
}

TEST_CASE("2-D square: boundary concentration and refinement") {
  const Rectangle square(-1, 1, -1, 1);
  EqDiagnostics diag;
  const auto eq = solve_equilibrium(square, WeightFunction::unit(square), 24 * 24, {}, &diag);
  CHECK(diag.converged);
  CHECK(diag.kernel_lambda_max < 1e-8);
  // the equilibrium measure of a planar compact with interior sits on the
  // outer boundary: interior cells should carry almost nothing
  double interior = 0.0;
  for (std::size_t i = 0; i < eq.size(); ++i) {
    const auto z = eq.nodes()[i];
    if (std::fabs(z.real()) < 0.7 && std::fabs(z.imag()) < 0.7) interior += eq.masses()[i];
  }
  CHECK(interior < 0.02);
  // four-fold symmetry
  const double m_right = bin_mass(eq, 0.9, 1.01);
  const double m_left = bin_mass(eq, -1.01, -0.9);
  CHECK(m_right == doctest::Approx(m_left).epsilon(1e-8));
}

}  // TEST_SUITE
