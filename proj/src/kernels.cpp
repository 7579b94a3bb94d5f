#include "loggas/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <limits>

namespace loggas::kernels {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_dist(complexd a, complexd b) {
  const double dx = a.real() - b.real();
  const double dy = a.imag() - b.imag();
  if (dx == 0.0 && dy == 0.0) return kNegInf;
  return 0.5 * std::log(dx * dx + dy * dy);
}

// one row of the pair sum: sum_{j>i} log|p_i - p_j|
inline double pair_row(std::span<const complexd> pts, std::size_t i) {
  double acc = 0.0;
  for (std::size_t j = i + 1; j < pts.size(); ++j) acc += log_dist(pts[i], pts[j]);
  return acc;
}

inline double cross_row(std::span<const complexd> nodes, std::span<const double> masses,
                        std::size_t i) {
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j == i) continue;
    acc += masses[j] * log_dist(nodes[i], nodes[j]);
  }
  return masses[i] * acc;
}
}  // namespace

int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) { omp_set_num_threads(n); }

namespace detail {

double block_sum_run(std::size_t n, double (*f)(std::size_t, const void*), const void* ctx,
                     bool parallel) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  if (nb <= 1 || !parallel) {
    // same blocking and order as the parallel path
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      double acc = 0.0;
      const std::size_t hi = std::min(n, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < hi; ++i) acc += f(i, ctx);
      total += acc;
    }
    return total;
  }
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    double acc = 0.0;
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) acc += f(i, ctx);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

MaxResult grid_max_run(std::size_t n, double (*f)(std::size_t, const void*), const void* ctx,
                       bool parallel) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<MaxResult> partial(nb, {kNegInf, 0});
  auto scan_block = [&](std::size_t b) {
    MaxResult best{kNegInf, b * kBlock};
    const std::size_t hi = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < hi; ++i) {
      const double v = f(i, ctx);
      if (v > best.value) best = {v, i};
    }
    partial[b] = best;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b)
      scan_block(static_cast<std::size_t>(b));
  } else {
    for (std::size_t b = 0; b < nb; ++b) scan_block(b);
  }
  MaxResult best{kNegInf, 0};
  for (const auto& p : partial)
    if (p.value > best.value) best = p;
  return best;
}

}  // namespace detail

double pair_log_sum(std::span<const complexd> pts) {
  const std::size_t d = pts.size();
  if (d < 2) return 0.0;
  std::vector<double> row(d - 1, 0.0);
#pragma omp parallel for schedule(static, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(d - 1); ++i)
    row[static_cast<std::size_t>(i)] = pair_row(pts, static_cast<std::size_t>(i));
  double total = 0.0;
  for (double r : row) total += r;
  return total;
}

double cross_log_sum(std::span<const complexd> nodes, std::span<const double> masses) {
  const std::size_t n = nodes.size();
  std::vector<double> row(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    row[static_cast<std::size_t>(i)] = cross_row(nodes, masses, static_cast<std::size_t>(i));
  double total = 0.0;
  for (double r : row) total += r;
  return total;
}

void assemble_log_kernel(std::span<const complexd> nodes, std::span<const double> diag,
                         std::vector<double>& out) {
  const std::size_t n = nodes.size();
  out.assign(n * n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double* r = out.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) r[j] = (j == i) ? diag[i] : log_dist(nodes[i], nodes[j]);
  }
}

void symv(const std::vector<double>& m, std::size_t n, std::span<const double> x,
          std::span<double> y) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const double* r = m.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
}

double quad_form(const std::vector<double>& m, std::size_t n, std::span<const double> x) {
  std::vector<double> row(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const double* r = m.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * x[j];
    row[i] = x[i] * acc;
  }
  double total = 0.0;
  for (double r : row) total += r;
  return total;
}

namespace ref {

double pair_log_sum(std::span<const complexd> pts) {
  const std::size_t d = pts.size();
  if (d < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i) total += pair_row(pts, i);
  return total;
}

double cross_log_sum(std::span<const complexd> nodes, std::span<const double> masses) {
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) total += cross_row(nodes, masses, i);
  return total;
}

void assemble_log_kernel(std::span<const complexd> nodes, std::span<const double> diag,
                         std::vector<double>& out) {
  const std::size_t n = nodes.size();
  out.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* r = out.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) r[j] = (j == i) ? diag[i] : log_dist(nodes[i], nodes[j]);
  }
}

void symv(const std::vector<double>& m, std::size_t n, std::span<const double> x,
          std::span<double> y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = m.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
}

double quad_form(const std::vector<double>& m, std::size_t n, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = m.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * x[j];
    total += x[i] * acc;
  }
  return total;
}

}  // namespace ref

}  // namespace loggas::kernels
