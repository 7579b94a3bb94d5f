#include <doctest.h>

#include <cmath>
#include <sstream>

#include "loggas/classical.hpp"
#include "loggas/measures.hpp"
#include "loggas/rng.hpp"
#include "oracles.hpp"

using namespace loggas;

TEST_SUITE("measures") {

TEST_CASE("moments of simple atomic measures") {
  GridMeasure delta0({{0.0, 0.0}}, {1.0});
  const auto t0 = moments(delta0, 2);
  CHECK(t0.at(0, 0) == 1.0);
  CHECK(t0.at(1, 0) == 0.0);
  CHECK(t0.at(2, 0) == 0.0);
  CHECK(t0.at(1, 1) == 0.0);

  GridMeasure pm({{-1.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5});
  const auto t1 = moments(pm, 2);
  CHECK(t1.at(1, 0) == 0.0);
  CHECK(t1.at(2, 0) == 1.0);
}

TEST_CASE("moments of the discretized arcsine match the quadrature oracle") {
  const double oracle = oracles::arcsine_moment(2);
  CHECK(oracle == doctest::Approx(0.5).epsilon(1e-9));
  const auto m = arcsine_measure(512);
  CHECK(moments(m, 2).at(2, 0) == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("empirical measures merge coincident points") {
  const auto e1 = empirical(Configuration{{{1, 0}, {-1, 0}}});
  CHECK(e1.size() == 2);
  CHECK(e1.masses()[0] == doctest::Approx(0.5));

  const auto e2 = empirical(Configuration{{{0, 0}, {0, 0}, {1, 0}}});
  REQUIRE(e2.size() == 2);
  CHECK(e2.masses()[0] == doctest::Approx(2.0 / 3.0));
  CHECK(e2.masses()[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("empirical moments equal direct power sums") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform_int(10));
    Configuration c;
    for (int i = 0; i < d; ++i) c.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const auto m = empirical(c);
    double sum = 0.0;
    for (double x : m.masses()) sum += x;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
    const auto t = moments(m, 3);
    for (const auto& e : t.entries) {
      double direct = 0.0;
      for (auto z : c.points)
        direct += std::pow(z.real(), e.n1) * std::pow(z.imag(), e.n2) / d;
      CHECK(e.value == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("Lobatto-48 empirical second moment is near the arcsine value") {
  Configuration c;
  for (double x : chebyshev_lobatto(48)) c.points.push_back({x, 0.0});
  const double direct = moments(empirical(c), 2).at(2, 0);
  CHECK(std::fabs(direct - oracles::arcsine_moment(2)) < 0.03);
}

TEST_CASE("window membership is strict and matches direct comparison") {
  const auto ref = arcsine_measure(512);
  const auto e = empirical(Configuration{{{1, 0}, {-1, 0}}});
  // the (2,0) gap is |1 - 0.5| = 0.5
  CHECK(in_neighborhood(e, MomentNeighborhood::around(ref, 2, 0.6)));
  CHECK(!in_neighborhood(e, MomentNeighborhood::around(ref, 2, 0.4)));
  CHECK(in_neighborhood(ref, MomentNeighborhood::around(ref, 2, 1e-9)));
}

TEST_CASE("window nesting: tighter windows imply looser ones") {
  const auto ref = arcsine_measure(256);
  Rng rng(23);
  int inside = 0;
  for (int rep = 0; rep < 200; ++rep) {
    Configuration c;
    for (int i = 0; i < 8; ++i) c.points.push_back({rng.uniform(-1, 1), 0.0});
    const auto e = empirical(c);
    const bool tight = in_neighborhood(e, MomentNeighborhood::around(ref, 4, 0.2));
    const bool loose = in_neighborhood(e, MomentNeighborhood::around(ref, 2, 0.3));
    if (tight) {
      CHECK(loose);
      ++inside;
    }
  }
  CHECK(inside > 0);  // the implication was actually exercised
}

TEST_CASE("polynomial integrals against window measures differ by at most sum|c| * eps") {
  const auto ref = arcsine_measure(256);
  const int k = 3;
  const double eps = 0.15;
  const auto nb = MomentNeighborhood::around(ref, k, eps);
  Rng rng(31);
  int exercised = 0;
  for (int rep = 0; rep < 300; ++rep) {
    Configuration c;
    for (int i = 0; i < 12; ++i) c.points.push_back({rng.uniform(-1, 1), 0.0});
    const auto e = empirical(c);
    if (!in_neighborhood(e, nb)) continue;
    ++exercised;
    // random polynomial of total degree <= k
    std::vector<double> coeff;
    double cbound = 0.0;
    const auto em = moments(e, k);
    const auto rm = moments(ref, k);
    double diff = 0.0;
    for (std::size_t t = 0; t < em.entries.size(); ++t) {
      const double cj = rng.uniform(-2, 2);
      coeff.push_back(cj);
      cbound += std::fabs(cj);
      diff += cj * (em.entries[t].value - rm.entries[t].value);
    }
    CHECK(std::fabs(diff) <= cbound * eps + 1e-12);
  }
  CHECK(exercised > 0);
}

TEST_CASE("strictly nested references give nested windows") {
  const auto mu = arcsine_measure(256);
  const double eps = 0.2, eta = 0.05;
  // nu: a slightly scaled arcsine whose gaps to mu stay below eps - eta
  const auto nu = scaled_arcsine_measure(256, 0.95);
  const auto nb_mu = MomentNeighborhood::around(mu, 2, eps);
  REQUIRE(max_moment_gap(nu, nb_mu).gap < eps - eta);
  const auto nb_nu = MomentNeighborhood::around(nu, 2, eta);
  Rng rng(37);
  int exercised = 0;
  for (int rep = 0; rep < 400; ++rep) {
    Configuration c;
    for (int i = 0; i < 10; ++i) c.points.push_back({rng.uniform(-1, 1), 0.0});
    const auto e = empirical(c);
    if (!in_neighborhood(e, nb_nu)) continue;
    ++exercised;
    CHECK(in_neighborhood(e, nb_mu));
  }
  CHECK(exercised > 0);
}

TEST_CASE("perturbation box radius and membership") {
  Configuration c;
  for (int i = 0; i < 4; ++i) c.points.push_back({0.2 * i, 0.0});
  const auto box = PerturbationBox::of(c);
  CHECK(box.radius == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(box.contains(c));
}

TEST_CASE("box samples stay in the doubled window for d >= 16") {
  const auto ref = arcsine_measure(512);
  const int k = 2;
  const double eps = 0.05;
  const auto nb1 = MomentNeighborhood::around(ref, k, eps);
  const auto nb2 = MomentNeighborhood::around(ref, k, 2 * eps);
  const Rectangle h = Rectangle::interval(-1, 1);
  int d0 = -1;
  for (int d : {9, 16, 25, 36, 64}) {
    Configuration c;
    for (double x : chebyshev_lobatto(d)) c.points.push_back({x, 0.0});
    if (!in_neighborhood(empirical(c), nb1)) continue;
    const auto box = PerturbationBox::of(c);
    Rng rng(1234 + d);
    bool all = true;
    for (int s = 0; s < 50; ++s) {
      const auto pert = box.sample(h, rng);
      CHECK(box.contains(pert));
      all = all && in_neighborhood(empirical(pert), nb2);
    }
    if (all && d0 < 0) d0 = d;
    if (d >= 16) CHECK(all);
  }
  CHECK(d0 > 0);
  MESSAGE("empirical d0 for the doubled-window property: ", d0);
}

TEST_CASE("serialization round trips") {
  const auto m = arcsine_measure(32);
  std::stringstream ss;
  m.write_csv(ss);
  const auto back = GridMeasure::read_csv(ss);
  REQUIRE(back.size() == m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(back.nodes()[i] == m.nodes()[i]);
    CHECK(back.masses()[i] == m.masses()[i]);
  }
  CHECK(!back.is_discretization());  // CSV carries no cell data

  const auto j = m.to_json();
  const auto back2 = GridMeasure::from_json(j);
  CHECK(back2.is_discretization());
  CHECK(back2.cell_self_energy() == m.cell_self_energy());

  const auto nb = MomentNeighborhood::around(m, 3, 0.1);
  const auto nb2 = MomentNeighborhood::from_json(nb.to_json());
  CHECK(nb2.k == 3);
  CHECK(nb2.epsilon == 0.1);
  CHECK(nb2.reference.entries.size() == nb.reference.entries.size());
}

TEST_CASE("invariant violations are rejected") {
  CHECK_THROWS_AS(GridMeasure({{0, 0}}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(GridMeasure({{0, 0}, {1, 0}}, {-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(GridMeasure({{0, 0}, {0, 0}}, {0.5, 0.5}), std::invalid_argument);
  const auto m = arcsine_measure(32);
  CHECK_THROWS_AS(MomentNeighborhood::around(m, 2, 0.0), std::invalid_argument);
  auto bad = moments(m, 2);
  bad.entries[0].value = 0.9;  // (0,0) must be 1
  CHECK_THROWS_AS(MomentNeighborhood(bad, 2, 0.1), std::invalid_argument);
}

TEST_CASE("degenerate rectangles kill the y-moments") {
  const auto m = arcsine_measure(64);
  for (const auto& e : moments(m, 3).entries)
    if (e.n2 >= 1) CHECK(e.value == 0.0);
}

}  // TEST_SUITE
