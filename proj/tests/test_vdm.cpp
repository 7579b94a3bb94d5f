#include <doctest.h>

#include <cmath>
#include <complex>

#include "loggas/rng.hpp"
#include "loggas/vdm.hpp"

using namespace loggas;

namespace {

Configuration random_config(int d, std::uint64_t seed, double min_gap = 0.05) {
  Rng rng(seed);
  Configuration c;
  while (c.d() < d) {
    const complexd z(rng.uniform(-1, 1), rng.uniform(-1, 1));
    bool ok = true;
    for (auto p : c.points)
      if (std::abs(p - z) < min_gap) ok = false;
    if (ok) c.points.push_back(z);
  }
  return c;
}

}  // namespace

TEST_SUITE("vdm") {

TEST_CASE("two points at unit distance") {
  CHECK(log_vdm(Configuration{{{0, 0}, {1, 0}}}) == 0.0);
}

TEST_CASE("cube roots of unity") {
  Configuration c;
  for (int k = 0; k < 3; ++k)
    c.points.push_back(std::polar(1.0, 2.0 * M_PI * k / 3.0));
  CHECK(log_vdm(c) == doctest::Approx(1.5 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("coincident points give the -inf sentinel, not an error") {
  CHECK(log_vdm(Configuration{{{0, 0}, {0, 0}, {1, 0}}}) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("d < 2 is a usage error") {
  CHECK_THROWS_AS(log_vdm(Configuration{{{0, 0}}}), std::invalid_argument);
}

TEST_CASE("unit weight reduces to the plain Vandermonde") {
  const auto c = random_config(6, 9);
  const auto h = Rectangle(-1, 1, -1, 1);
  CHECK(log_wvdm(c, WeightFunction::unit(h)) == log_vdm(c));
}

TEST_CASE("gaussian weight at the interval endpoints") {
  const auto h = Rectangle::interval(-1, 1);
  const auto w = WeightFunction::exp_poly(h, {{2, 0, 1.0}});
  const Configuration c{{{-1, 0}, {1, 0}}};
  CHECK(log_wvdm(c, w) == doctest::Approx(std::log(2.0) - 4.0).epsilon(1e-12));
}

TEST_CASE("points outside the weight domain are rejected") {
  const auto h = Rectangle::interval(-1, 1);
  const auto w = WeightFunction::exp_poly(h, {{2, 0, 1.0}});
  CHECK_THROWS_AS(log_wvdm(Configuration{{{-2, 0}, {1, 0}}}, w), std::invalid_argument);
}

TEST_CASE("exp of the weighted value matches the brute-force product at d = 5") {
  const auto h = Rectangle(-1, 1, -1, 1);
  const auto w = WeightFunction::exp_poly(h, {{2, 0, 1.0}, {0, 2, 1.0}});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto c = random_config(5, seed);
    double prod = 1.0;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) prod *= std::norm(c.points[i] - c.points[j]);
    for (auto z : c.points) prod *= std::pow(w.value(z), 2.0 * 5);
    CHECK(std::exp(2.0 * log_wvdm(c, w)) == doctest::Approx(prod).epsilon(1e-10));
  }
}

TEST_CASE("hand gradient at d = 2") {
  const auto h = Rectangle::interval(-1, 1);
  const auto g = grad_log_wvdm(Configuration{{{-1, 0}, {1, 0}}}, WeightFunction::unit(h));
  CHECK(g[0] == doctest::Approx(-0.5));
  CHECK(g[2] == doctest::Approx(0.5));
}

TEST_CASE("gradient matches central finite differences") {
  const auto h = Rectangle(-2, 2, -2, 2);
  const auto w = WeightFunction::poly(h, {{0, 0, 1.0}, {2, 0, 0.25}});
  const double step = 1e-6;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int d = 3 + static_cast<int>(seed % 8);
    const auto c = random_config(d, 100 + seed);
    const auto g = grad_log_wvdm(c, w);
    double max_err = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int axis = 0; axis < 2; ++axis) {
        auto cp = c, cm = c;
        const complexd e = axis == 0 ? complexd(step, 0) : complexd(0, step);
        cp.points[i] += e;
        cm.points[i] -= e;
        const double fd = (log_wvdm(cp, w) - log_wvdm(cm, w)) / (2 * step);
        max_err = std::max(max_err, std::fabs(fd - g[2 * i + axis]));
      }
    }
    CHECK(max_err <= 1e-5);
  }
}

TEST_CASE("gradient is antisymmetric for symmetric configurations under even weights") {
  const auto h = Rectangle::interval(-1, 1);
  const auto w = WeightFunction::exp_poly(h, {{2, 0, 1.0}});
  const Configuration c{{{-0.8, 0}, {-0.3, 0}, {0.3, 0}, {0.8, 0}}};
  const auto g = grad_log_wvdm(c, w);
  CHECK(g[0] == doctest::Approx(-g[6]).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(-g[4]).epsilon(1e-12));
}

TEST_CASE("gradient error paths") {
  const auto h = Rectangle::interval(-1, 1);
  CHECK_THROWS_AS(
      grad_log_wvdm(Configuration{{{0, 0}, {0, 0}}}, WeightFunction::unit(h)),
      std::domain_error);
  const auto tab = WeightFunction::tabulated(h, 3, 1, {1, 1, 1});
  CHECK_THROWS_AS(grad_log_wvdm(Configuration{{{-0.5, 0}, {0.5, 0}}}, tab),
                  std::invalid_argument);
}

TEST_CASE("permutation invariance of the weighted value") {
  const auto h = Rectangle(-1, 1, -1, 1);
  const auto w = WeightFunction::exp_poly(h, {{2, 0, 1.0}});
  auto c = random_config(7, 55);
  const double v = log_wvdm(c, w);
  std::reverse(c.points.begin(), c.points.end());
  CHECK(log_wvdm(c, w) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("weight-swap factorization identity") {
  const auto h = Rectangle::interval(-1, 1);
  const auto w = WeightFunction::exp_poly(h, {{2, 0, 1.0}});
  const auto phi = WeightFunction::poly(h, {{0, 0, 1.0}, {2, 0, 0.25}});
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    auto c = random_config(6, seed);
    for (auto& z : c.points) z = {z.real(), 0.0};  // keep inside the interval
    double sw = 0.0, sp = 0.0;
    for (auto z : c.points) {
      sw += w.log_value(z);
      sp += phi.log_value(z);
    }
    const double lhs = 2.0 * log_wvdm(c, phi) + 2.0 * c.d() * sw;
    const double rhs = 2.0 * log_wvdm(c, w) + 2.0 * c.d() * sp;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("Markov-Lipschitz coefficient") {
  CHECK(markov_lipschitz_bound(1, 1.0) == 1.0);
  CHECK(markov_lipschitz_bound(7, 2.0) == doctest::Approx(98.0));
  CHECK_THROWS_AS(markov_lipschitz_bound(0, 1.0), std::invalid_argument);
}

TEST_CASE("Chebyshev polynomials saturate but respect the k^2 bound on [-1,1]") {
  // dense-sampling oracle: sup |T_k(x1)-T_k(x2)|/|x1-x2| <= k^2 with A = 1
  for (int k : {3, 6, 10}) {
    auto tk = [k](double x) { return std::cos(k * std::acos(std::clamp(x, -1.0, 1.0))); };
    double worst = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      const double x1 = -1.0 + 2.0 * i / (n - 1.0);
      const double x2 = std::min(1.0, x1 + 1e-4);
      if (x2 == x1) continue;
      worst = std::max(worst, std::fabs(tk(x1) - tk(x2)) / (x2 - x1));
    }
    CHECK(worst <= markov_lipschitz_bound(k, 1.0) * (1 + 1e-9));
    CHECK(worst > 0.5 * k * k);  // the bound is the right order
  }
}

TEST_CASE("Markov constant rescales as 2/length") {
  CHECK(markov_constant(Rectangle::interval(-1, 1)) == doctest::Approx(1.0));
  CHECK(markov_constant(Rectangle::interval(0, 2)) == doctest::Approx(1.0));
  CHECK(markov_constant(Rectangle::interval(0, 1)) == doctest::Approx(2.0));
  CHECK(markov_constant(Rectangle(0, 2, 0, 1)) == doctest::Approx(2.0));
}

TEST_CASE("perturbation floor values") {
  const MarkovBoundParams p{1.0, 1.0, 1.0};
  CHECK(perturbation_floor(400, p) ==
        doctest::Approx(1.0 - 400.0 * 400.0 * 400.0 * std::exp(-20.0)).epsilon(1e-12));
  CHECK(perturbation_floor(400, p) == doctest::Approx(0.868086).epsilon(1e-4));
  CHECK(perturbation_floor(100, p) < 0.0);  // vacuous regime
  // decays to 1 beyond the vacuous regime
  CHECK(perturbation_floor(2000, p) > perturbation_floor(900, p));
  CHECK(perturbation_floor(10000, p) > 0.999);
}

TEST_CASE("degree bookkeeping for the squared weighted Vandermonde") {
  const auto h = Rectangle::interval(-1, 1);
  const auto w = WeightFunction::poly(h, {{0, 0, 1.0}, {2, 0, 0.25}});
  const auto p = markov_params(h, w);
  CHECK(p.a == doctest::Approx(1.0));
  CHECK(p.c1 == doctest::Approx(6.0));
  CHECK(p.gamma1 == doctest::Approx(1.0));
  CHECK_THROWS_AS(markov_params(h, WeightFunction::tabulated(h, 3, 1, {1, 1, 1})),
                  std::invalid_argument);
}

}  // TEST_SUITE
