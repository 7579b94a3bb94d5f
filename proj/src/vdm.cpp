#include "loggas/vdm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "loggas/kernels.hpp"

namespace loggas {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_vdm(const Configuration& lambda) {
  if (lambda.d() < 2) throw std::invalid_argument("log_vdm: need d >= 2");
  return kernels::pair_log_sum(lambda.points);
}

double log_wvdm(const Configuration& lambda, const WeightFunction& w) {
  const double pair = log_vdm(lambda);
  if (w.kind() == WeightKind::unit) return pair;
  const int d = lambda.d();
  double s = 0.0;
  for (auto z : lambda.points) {
    if (!w.domain().contains(z, 1e-12))
      throw std::invalid_argument("log_wvdm: point outside the weight's domain");
    s += w.log_value(z);
  }
  return pair + d * s;
}

std::vector<double> grad_log_wvdm(const Configuration& lambda, const WeightFunction& w) {
  const int d = lambda.d();
  if (d < 2) throw std::invalid_argument("grad_log_wvdm: need d >= 2");
  if (!w.differentiable())
    throw std::invalid_argument("grad_log_wvdm: weight kind has no gradient");
  std::vector<double> g(2 * d, 0.0);
  for (int i = 0; i < d; ++i) {
    double gx = 0.0, gy = 0.0;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const complexd diff = lambda.points[i] - lambda.points[j];
      const double r2 = std::norm(diff);
      if (r2 == 0.0)
        throw std::domain_error("grad_log_wvdm: singular configuration (coincident points)");
      gx += diff.real() / r2;
      gy += diff.imag() / r2;
    }
    if (w.kind() != WeightKind::unit) {
      const auto gl = w.grad_log(lambda.points[i]);
      gx += d * gl[0];
      gy += d * gl[1];
    }
    g[2 * i] = gx;
    g[2 * i + 1] = gy;
  }
  return g;
}

double markov_constant(const Rectangle& h) {
  double a = 2.0 / h.width();
  if (!h.degenerate()) a = std::max(a, 2.0 / h.height());
  return a;
}

double markov_lipschitz_bound(int degree, double a) {
  if (degree < 1) throw std::invalid_argument("markov_lipschitz_bound: degree >= 1");
  if (a <= 0.0) throw std::invalid_argument("markov_lipschitz_bound: A > 0");
  return a * static_cast<double>(degree) * degree;
}

double markov_lipschitz_bound(int degree, const Rectangle& h) {
  return markov_lipschitz_bound(degree, markov_constant(h));
}

MarkovBoundParams markov_params(const Rectangle& h, const WeightFunction& w) {
  if (!w.is_polynomial())
    throw std::invalid_argument("markov_params: weight must be polynomial");
  return {markov_constant(h), 2.0 + 2.0 * w.per_variable_degree(), 1.0};
}

double perturbation_floor(int d, const MarkovBoundParams& p) {
  if (d < 1) throw std::invalid_argument("perturbation_floor: d >= 1");
  const double dd = static_cast<double>(d);
  const double deg = p.c1 * std::pow(dd, p.gamma1);
  return 1.0 - dd * p.a * deg * deg * std::exp(-std::sqrt(dd));
}

}  // namespace loggas
