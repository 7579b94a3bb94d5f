#include <doctest.h>

#include <cmath>

#include "loggas/weights.hpp"

using namespace loggas;

TEST_SUITE("weights") {

TEST_CASE("unit weight") {
  const auto h = Rectangle::interval(-1, 1);
  const auto w = WeightFunction::unit(h);
  CHECK(w.value({0.3, 0}) == 1.0);
  CHECK(w.log_value({0.3, 0}) == 0.0);
  CHECK(w.grad_log({0.3, 0})[0] == 0.0);
  CHECK(w.per_variable_degree() == 0);
}

TEST_CASE("exp_poly weight w = exp(-x^2)") {
  const auto h = Rectangle::interval(-1, 1);
  const auto w = WeightFunction::exp_poly(h, {{2, 0, 1.0}});
  CHECK(w.value({0.5, 0}) == doctest::Approx(std::exp(-0.25)));
  CHECK(w.log_value({0.5, 0}) == doctest::Approx(-0.25));
  const auto g = w.grad_log({0.5, 0});
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == 0.0);
}

TEST_CASE("2-D exp_poly gradient includes the y term") {
  const Rectangle h(-1, 1, -1, 1);
  const auto w = WeightFunction::exp_poly(h, {{2, 0, 1.0}, {0, 2, 2.0}});
  const auto g = w.grad_log({0.25, -0.5});
  CHECK(g[0] == doctest::Approx(-0.5));
  CHECK(g[1] == doctest::Approx(2.0));  // -(2*2*y) = -4*(-0.5)
}

TEST_CASE("poly weight validates positivity on the domain") {
  const auto h = Rectangle::interval(-1, 1);
  const auto w = WeightFunction::poly(h, {{0, 0, 1.0}, {2, 0, 0.25}});
  CHECK(w.value({1, 0}) == doctest::Approx(1.25));
  CHECK(w.per_variable_degree() == 2);
  const auto g = w.grad_log({1, 0});
  CHECK(g[0] == doctest::Approx(0.5 / 1.25));
  CHECK_THROWS_AS(WeightFunction::poly(h, {{1, 0, 1.0}}), std::invalid_argument);  // w = x
}

TEST_CASE("tabulated weight interpolates and has no gradient") {
  const auto h = Rectangle::interval(0, 1);
  const auto w = WeightFunction::tabulated(h, 3, 1, {1.0, 2.0, 4.0});
  CHECK(w.value({0.25, 0}) == doctest::Approx(1.5));
  CHECK(w.value({0.75, 0}) == doctest::Approx(3.0));
  CHECK(!w.differentiable());
  CHECK_THROWS_AS(w.grad_log({0.5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(WeightFunction::tabulated(h, 3, 1, {1.0, 0.0, 4.0}), std::invalid_argument);
}

TEST_CASE("JSON round trip preserves evaluation") {
  const auto h = Rectangle::interval(-1, 1);
  for (const auto& w :
       {WeightFunction::unit(h), WeightFunction::exp_poly(h, {{2, 0, 1.0}}),
        WeightFunction::poly(h, {{0, 0, 1.0}, {2, 0, 0.25}}),
        WeightFunction::tabulated(h, 5, 1, {1, 2, 3, 2, 1})}) {
    const auto back = WeightFunction::from_json(w.to_json(), h);
    CHECK(back.kind() == w.kind());
    for (double x : {-0.9, -0.3, 0.0, 0.7})
      CHECK(back.value({x, 0}) == doctest::Approx(w.value({x, 0})).epsilon(1e-15));
  }
}

TEST_CASE("content hashes separate different weights") {
  const auto h = Rectangle::interval(-1, 1);
  const auto a = WeightFunction::exp_poly(h, {{2, 0, 1.0}});
  const auto b = WeightFunction::exp_poly(h, {{2, 0, 1.5}});
  CHECK(a.content_hash() != b.content_hash());
  CHECK(a.content_hash() == WeightFunction::exp_poly(h, {{2, 0, 1.0}}).content_hash());
}

}  // TEST_SUITE
