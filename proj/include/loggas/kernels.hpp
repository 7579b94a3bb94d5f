#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loggas/geometry.hpp"

namespace loggas::kernels {

// Hot data-parallel loops, OpenMP-parallelised.  Every reduction is blocked
// with a fixed block size and the block partials are combined in index order,
// so results are bit-identical for any thread count.  Serial reference
// implementations with the same summation order live in kernels::ref and are
// compared against these in the test suite and the benchmark tool.

inline constexpr std::size_t kBlock = 1024;

int max_threads();
void set_threads(int n);

/// sum_{i<j} log|z_i - z_j|; -inf when two points coincide exactly
double pair_log_sum(std::span<const complexd> pts);

/// sum_{i != j} m_i m_j log|z_i - z_j| without materialising the kernel;
/// coincident node pairs yield -inf
double cross_log_sum(std::span<const complexd> nodes, std::span<const double> masses);

/// dense symmetric log-kernel: out[i*n+j] = log|z_i - z_j|, out[i*n+i] = diag[i]
void assemble_log_kernel(std::span<const complexd> nodes, std::span<const double> diag,
                         std::vector<double>& out);

/// y = M x for dense symmetric M (n x n, row-major)
void symv(const std::vector<double>& m, std::size_t n, std::span<const double> x,
          std::span<double> y);

/// x' M x
double quad_form(const std::vector<double>& m, std::size_t n, std::span<const double> x);

struct MaxResult {
  double value;
  std::size_t index;
};

namespace detail {
double block_sum_run(std::size_t n, double (*f)(std::size_t, const void*), const void* ctx,
                     bool parallel);
MaxResult grid_max_run(std::size_t n, double (*f)(std::size_t, const void*), const void* ctx,
                       bool parallel);
template <class F>
double thunk(std::size_t i, const void* ctx) {
  return (*static_cast<const F*>(ctx))(i);
}
}  // namespace detail

/// blocked deterministic sum of f(0..n-1)
template <class F>
double block_sum(std::size_t n, F&& f) {
  return detail::block_sum_run(n, detail::thunk<std::decay_t<F>>, &f, true);
}

/// max of f over 0..n-1 with lowest-index tie-break
template <class F>
MaxResult grid_max(std::size_t n, F&& f) {
  return detail::grid_max_run(n, detail::thunk<std::decay_t<F>>, &f, true);
}

namespace ref {

double pair_log_sum(std::span<const complexd> pts);
double cross_log_sum(std::span<const complexd> nodes, std::span<const double> masses);
void assemble_log_kernel(std::span<const complexd> nodes, std::span<const double> diag,
                         std::vector<double>& out);
void symv(const std::vector<double>& m, std::size_t n, std::span<const double> x,
          std::span<double> y);
double quad_form(const std::vector<double>& m, std::size_t n, std::span<const double> x);

template <class F>
double block_sum(std::size_t n, F&& f) {
  return detail::block_sum_run(n, detail::thunk<std::decay_t<F>>, &f, false);
}
template <class F>
MaxResult grid_max(std::size_t n, F&& f) {
  return detail::grid_max_run(n, detail::thunk<std::decay_t<F>>, &f, false);
}

}  // namespace ref

}  // namespace loggas::kernels
