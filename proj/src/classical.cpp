#include "loggas/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loggas {

double arcsine_cdf(double x) {
  x = std::clamp(x, -1.0, 1.0);
  return 0.5 + std::asin(x) / M_PI;
}

double semicircle_cdf(double x, double b) {
  if (x <= -b) return 0.0;
  if (x >= b) return 1.0;
  return 0.5 + (x * std::sqrt(b * b - x * x) / (b * b) + std::asin(x / b)) / M_PI;
}

namespace {
GridMeasure cdf_discretization(int n, double lo, double hi,
                               const std::function<double(double)>& cdf,
                               const std::string& label) {
  if (n < 2) throw std::invalid_argument("discretization: n >= 2");
  const double h = (hi - lo) / n;
  std::vector<complexd> nodes(n);
  std::vector<double> masses(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    nodes[i] = complexd(lo + (i + 0.5) * h, 0.0);
    masses[i] = cdf(lo + (i + 1) * h) - cdf(lo + i * h);
    total += masses[i];
  }
  for (double& m : masses) m /= total;
  GridMeasure g(std::move(nodes), std::move(masses), label);
  // mean of log|s-t| over a coincident 1-D cell pair of width h
  g.set_cell_self_energy(std::vector<double>(n, std::log(h) - 1.5));
  return g;
}
}  // namespace

GridMeasure arcsine_measure(int n) {
  return cdf_discretization(n, -1.0, 1.0, [](double x) { return arcsine_cdf(x); }, "arcsine");
}

GridMeasure scaled_arcsine_measure(int n, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("scaled_arcsine_measure: s > 0");
  return cdf_discretization(
      n, -s, s, [s](double x) { return arcsine_cdf(x / s); }, "arcsine-scaled");
}

std::vector<double> chebyshev_lobatto(int d, double a, double b) {
  if (d < 2) throw std::invalid_argument("chebyshev_lobatto: d >= 2");
  std::vector<double> x(d);
  for (int i = 0; i < d; ++i) {
    const double t = -std::cos(M_PI * i / (d - 1));
    x[i] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  return x;
}

std::vector<complexd> lobatto_start(const Rectangle& h, int d) {
  if (h.degenerate()) {
    std::vector<complexd> pts;
    for (double x : chebyshev_lobatto(d, h.x_min, h.x_max)) pts.emplace_back(x, h.y_min);
    return pts;
  }
  // tensor Lobatto grid just large enough, subsampled evenly to d points
  int mx = 2, my = 2;
  while (mx * my < d) {
    if (h.width() / mx >= h.height() / my)
      ++mx;
    else
      ++my;
  }
  const auto xs = chebyshev_lobatto(mx, h.x_min, h.x_max);
  const auto ys = chebyshev_lobatto(my, h.y_min, h.y_max);
  std::vector<complexd> grid;
  grid.reserve(static_cast<std::size_t>(mx) * my);
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < my; ++j) grid.emplace_back(xs[i], ys[j]);
  std::vector<complexd> pts(d);
  const std::size_t total = grid.size();
  for (int i = 0; i < d; ++i) pts[i] = grid[(i * total) / d];
  return pts;
}

}  // namespace loggas
