#include <doctest.h>

#include <chrono>
#include <cmath>

#include "loggas/classical.hpp"
#include "loggas/equilibrium.hpp"
#include "loggas/fekete.hpp"
#include "loggas/kernels.hpp"
#include "loggas/vdm.hpp"
#include "oracles.hpp"

using namespace loggas;

namespace {
const Rectangle kInterval = Rectangle::interval(-1, 1);
}

TEST_SUITE("fekete") {

TEST_CASE("two points maximize at the interval endpoints") {
  const auto r = solve_fekete(kInterval, WeightFunction::unit(kInterval), 2, {}, 7);
  CHECK(r.converged);
  CHECK(r.configuration.points[0].real() == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(r.configuration.points[1].real() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.delta_d == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("three points match the brute-force grid oracle") {
  // exhaustive symmetric scan of [-1,1]^3 at resolution 1e-3
  const int n = 2001;
  const auto val = [&](std::size_t flat) {
    const std::size_t i = flat / (static_cast<std::size_t>(n) * n);
    const std::size_t rem = flat % (static_cast<std::size_t>(n) * n);
    const std::size_t j = rem / n, k = rem % n;
    if (i > j || j > k) return -1.0;
    const double a = -1.0 + 1e-3 * i, b = -1.0 + 1e-3 * j, c = -1.0 + 1e-3 * k;
    return std::fabs((a - b) * (a - c) * (b - c));
  };
  const auto best = kernels::grid_max(static_cast<std::size_t>(n) * n * n, val);
  CHECK(best.value == doctest::Approx(2.0).epsilon(1e-12));  // attained at {-1, 0, 1}

  const auto r = solve_fekete(kInterval, WeightFunction::unit(kInterval), 3, {}, 7);
  CHECK(std::exp(r.log_wvdm_value) >= best.value - 1e-9);
  CHECK(r.delta_d == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-9));
  CHECK(r.configuration.points[0].real() == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(r.configuration.points[1].real() == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(r.configuration.points[2].real() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("Fekete empirical measures approach the arcsine law") {
  const auto r = solve_fekete(kInterval, WeightFunction::unit(kInterval), 12, {}, 7);
  const double m2 = moments(empirical(r.configuration), 2).at(2, 0);
  CHECK(std::fabs(m2 - oracles::arcsine_moment(2)) < 0.05);
}

TEST_CASE("objective history is nondecreasing and output is canonical") {
  const auto r = solve_fekete(kInterval, WeightFunction::exp_poly(kInterval, {{2, 0, 1.0}}), 9,
                              {}, 11);
  for (std::size_t i = 1; i < r.objective_history.size(); ++i)
    CHECK(r.objective_history[i] >= r.objective_history[i - 1] - 1e-9);
  for (int i = 1; i < r.configuration.d(); ++i)
    CHECK(r.configuration.points[i - 1].real() <= r.configuration.points[i].real());
}

TEST_CASE("identical seeds give bit-identical results") {
  const auto a = solve_fekete(kInterval, WeightFunction::unit(kInterval), 10, {}, 42);
  const auto b = solve_fekete(kInterval, WeightFunction::unit(kInterval), 10, {}, 42);
  CHECK(a.log_wvdm_value == b.log_wvdm_value);
  CHECK(a.configuration.points == b.configuration.points);
}

TEST_CASE("square diagonal at d = 2 and corner configuration at d = 4") {
  const Rectangle square(-1, 1, -1, 1);
  const auto r2 = solve_fekete(square, WeightFunction::unit(square), 2, {}, 7);
  CHECK(r2.delta_d == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-7));
  const auto r4 = solve_fekete(square, WeightFunction::unit(square), 4, {}, 7);
  // corners give |VDM| = 2^4 * (2 sqrt 2)^2 = 128
  CHECK(std::exp(r4.log_wvdm_value) == doctest::Approx(128.0).epsilon(1e-6));
}

TEST_CASE("diameter sweep: monotone, converged, classical limit for the interval") {
  const std::vector<int> ds{8, 16, 24, 32, 40, 48};
  const auto tab =
      transfinite_diameter(kInterval, WeightFunction::unit(kInterval), ds, {}, 7);
  CHECK(tab.all_converged);
  for (std::size_t i = 1; i < tab.rows.size(); ++i)
    CHECK(tab.rows[i].delta_d <= tab.rows[i - 1].delta_d + 1e-3);
  // classical value: the capacity of [-1,1] is 1/2
  CHECK(std::fabs(tab.delta_extrapolated - 0.5) / 0.5 < 0.02);
  // consistency with the equilibrium-energy route (|log delta + I_w| small)
  const auto eq = solve_equilibrium(kInterval, WeightFunction::unit(kInterval), 512);
  const double iw = weighted_energy(eq, WeightFunction::unit(kInterval)).weighted_energy;
  CHECK(std::fabs(std::log(tab.delta_extrapolated) + iw) < 0.03);
}

TEST_CASE("inactive constraints reduce to the unconstrained maximum") {
  const auto ref = arcsine_measure(512);
  const auto nb = MomentNeighborhood::around(ref, 2, 1e6);
  const auto c = constrained_sup_W(kInterval, WeightFunction::unit(kInterval), nb, 8, {}, 7);
  const auto f = solve_fekete(kInterval, WeightFunction::unit(kInterval), 8, {}, 7);
  CHECK(c.log_wvdm_value == doctest::Approx(f.log_wvdm_value).epsilon(1e-6));
}

TEST_CASE("a known feasible point lower-bounds the constrained sup") {
  Configuration l0;
  for (double x : chebyshev_lobatto(10)) l0.points.push_back({x, 0});
  const auto nb = MomentNeighborhood::around(empirical(l0), 3, 1e-3);
  const auto c = constrained_sup_W(kInterval, WeightFunction::unit(kInterval), nb, 10, {}, 7);
  CHECK(c.log_wvdm_value >= log_vdm(l0) - 1e-9);
  CHECK(in_neighborhood(empirical(c.configuration), nb));  // strict output filter
}

TEST_CASE("constrained values trend toward the window's entropy") {
  const auto ref = arcsine_measure(512);
  const auto nb = MomentNeighborhood::around(ref, 4, 0.05);
  double prev_gap = 1e9;
  for (int d : {16, 24, 32}) {
    const auto c = constrained_sup_W(kInterval, WeightFunction::unit(kInterval), nb, d, {}, 7);
    CHECK(c.worst_gap < nb.epsilon);
    const double logW = 2.0 * c.log_wvdm_value / (static_cast<double>(d) * (d - 1));
    const double gap = std::fabs(logW - (-std::log(2.0)));  // Sigma(arcsine)
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("infeasible windows raise an error naming the worst moment") {
  auto m = moments(arcsine_measure(128), 2);
  for (auto& e : m.entries)
    if (e.n1 == 2 && e.n2 == 0) e.value = 5.0;  // impossible on [-1,1]
  const MomentNeighborhood bad(m, 2, 0.01);
  CHECK_THROWS_AS(find_feasible(kInterval, bad, 8, 7), InfeasibleError);
  try {
    find_feasible(kInterval, bad, 8, 7);
  } catch (const InfeasibleError& e) {
    CHECK(e.n1() == 2);
    CHECK(e.gap() > 3.9);
  }
}

}  // TEST_SUITE
