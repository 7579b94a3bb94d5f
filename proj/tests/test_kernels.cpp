#include <doctest.h>

#include <cmath>
#include <vector>

#include "loggas/kernels.hpp"
#include "loggas/rng.hpp"

using namespace loggas;

namespace {
std::vector<complexd> random_points(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<complexd> pts(n);
  for (auto& z : pts) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return pts;
}
}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("pair_log_sum matches the serial reference bit for bit") {
  for (int n : {2, 3, 17, 300, 2500}) {
    const auto pts = random_points(n, 42 + n);
    CHECK(kernels::pair_log_sum(pts) == kernels::ref::pair_log_sum(pts));
  }
}

TEST_CASE("pair_log_sum is -inf on coincident points") {
  auto pts = random_points(5, 7);
  pts[3] = pts[1];
  CHECK(kernels::pair_log_sum(pts) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("blocked sums and grid max match the reference") {
  auto f = [](std::size_t i) { return std::sin(0.01 * static_cast<double>(i)); };
  for (std::size_t n : {1ul, 1000ul, 1024ul, 5000ul, 100001ul}) {
    CHECK(kernels::block_sum(n, f) == kernels::ref::block_sum(n, f));
    const auto a = kernels::grid_max(n, f);
    const auto b = kernels::ref::grid_max(n, f);
    CHECK(a.value == b.value);
    CHECK(a.index == b.index);
  }
}

TEST_CASE("grid max tie-break picks the lowest index") {
  auto f = [](std::size_t i) { return (i == 100 || i == 5000) ? 2.0 : 0.0; };
  CHECK(kernels::grid_max(10000, f).index == 100);
}

TEST_CASE("results do not depend on the thread count") {
  const auto pts = random_points(1200, 11);
  std::vector<double> masses(pts.size(), 1.0 / pts.size());
  const int saved = kernels::max_threads();
  kernels::set_threads(1);
  const double p1 = kernels::pair_log_sum(pts);
  const double c1 = kernels::cross_log_sum(pts, masses);
  kernels::set_threads(4);
  const double p4 = kernels::pair_log_sum(pts);
  const double c4 = kernels::cross_log_sum(pts, masses);
  kernels::set_threads(saved);
  CHECK(p1 == p4);
  CHECK(c1 == c4);
}

TEST_CASE("kernel assembly, symv and quadratic form match the reference") {
  const auto pts = random_points(257, 3);
  std::vector<double> diag(pts.size());
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = -5.0 - 0.001 * i;
  std::vector<double> a, b;
  kernels::assemble_log_kernel(pts, diag, a);
  kernels::ref::assemble_log_kernel(pts, diag, b);
  CHECK(a == b);

  Rng rng(99);
  std::vector<double> x(pts.size());
  for (auto& v : x) v = rng.uniform(-1, 1);
  std::vector<double> y1(x.size()), y2(x.size());
  kernels::symv(a, x.size(), x, y1);
  kernels::ref::symv(a, x.size(), x, y2);
  CHECK(y1 == y2);
  CHECK(kernels::quad_form(a, x.size(), x) == kernels::ref::quad_form(a, x.size(), x));
}

TEST_CASE("cross_log_sum agrees with a direct double loop") {
  const auto pts = random_points(60, 5);
  Rng rng(6);
  std::vector<double> masses(pts.size());
  double tot = 0.0;
  for (auto& m : masses) tot += (m = rng.uniform());
  for (auto& m : masses) m /= tot;
  double direct = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j) direct += masses[i] * masses[j] * std::log(std::abs(pts[i] - pts[j]));
  CHECK(kernels::cross_log_sum(pts, masses) ==
        doctest::Approx(direct).epsilon(1e-12));
}

}  // TEST_SUITE
