// Benchmark of the OpenMP kernels against the serial reference.

#include <chrono>
#include <cstdio>
#include <vector>

#include "loggas/kernels.hpp"
#include "loggas/rng.hpp"

using namespace loggas;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_ms(F&& f, int reps) {
  const double t0 = now_ms();
  for (int r = 0; r < reps; ++r) f();
  return (now_ms() - t0) / reps;
}

void row(const char* name, double serial, double parallel, bool match) {
  std::printf("%-24s %10.2f ms %10.2f ms   x%-5.2f %s\n", name, serial, parallel,
              serial / parallel, match ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", kernels::max_threads());
  std::printf("%-24s %13s %13s   %s\n", "kernel", "serial", "openmp", "speedup");

  Rng rng(1);
  {
    std::vector<complexd> pts(3000);
    for (auto& z : pts) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    double a = 0, b = 0;
    const double ts = time_ms([&] { a = kernels::ref::pair_log_sum(pts); }, 5);
    const double tp = time_ms([&] { b = kernels::pair_log_sum(pts); }, 5);
    row("pair_log_sum d=3000", ts, tp, a == b);
  }
  {
    const std::size_t n = 1536;
    std::vector<complexd> nodes(n);
    for (auto& z : nodes) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    std::vector<double> diag(n, -7.0), a, b;
    const double ts = time_ms([&] { kernels::ref::assemble_log_kernel(nodes, diag, a); }, 3);
    const double tp = time_ms([&] { kernels::assemble_log_kernel(nodes, diag, b); }, 3);
    row("assemble_kernel n=1536", ts, tp, a == b);

    std::vector<double> x(n), y1(n), y2(n);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const double ms = time_ms(
        [&] {
          for (int i = 0; i < 50; ++i) kernels::ref::symv(a, n, x, y1);
        },
        3);
    const double mp = time_ms(
        [&] {
          for (int i = 0; i < 50; ++i) kernels::symv(b, n, x, y2);
        },
        3);
    row("symv n=1536 x50", ms, mp, y1 == y2);
  }
  {
    const std::size_t n = 4096;
    std::vector<complexd> nodes(n);
    std::vector<double> masses(n, 1.0 / n);
    for (auto& z : nodes) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    double a = 0, b = 0;
    const double ts = time_ms([&] { a = kernels::ref::cross_log_sum(nodes, masses); }, 3);
    const double tp = time_ms([&] { b = kernels::cross_log_sum(nodes, masses); }, 3);
    row("cross_log_sum n=4096", ts, tp, a == b);
  }
  {
    auto f = [](std::size_t i) { return std::sin(1e-6 * static_cast<double>(i)); };
    double a = 0, b = 0;
    const double ts = time_ms([&] { a = kernels::ref::block_sum(20000000, f); }, 3);
    const double tp = time_ms([&] { b = kernels::block_sum(20000000, f); }, 3);
    row("block_sum n=2e7", ts, tp, a == b);
  }
  return 0;
}
