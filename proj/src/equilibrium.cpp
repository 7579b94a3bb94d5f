#include "loggas/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

#include "loggas/kernels.hpp"
#include "loggas/quadrature.hpp"

namespace loggas {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

// mean of log sqrt((hx u)^2 + (hy v)^2) against the tent density
// 4(1-u)(1-v) on [0,1]^2; dyadic split toward the log singularity at 0
double cell_constant_2d(double hx, double hy) {
  const auto& [gx, gw] = gauss_legendre(16);
  auto patch = [&](double ax, double bx, double ay, double by) {
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double u = 0.5 * (ax + bx) + 0.5 * (bx - ax) * gx[i];
      for (int j = 0; j < 16; ++j) {
        const double v = 0.5 * (ay + by) + 0.5 * (by - ay) * gx[j];
        acc += gw[i] * gw[j] * 4.0 * (1.0 - u) * (1.0 - v) * 0.5 *
               std::log(hx * hx * u * u + hy * hy * v * v);
      }
    }
    return acc * 0.25 * (bx - ax) * (by - ay);
  };
  double total = 0.0;
  double s = 1.0;
  for (int level = 0; level < 48; ++level) {
    const double t = 0.5 * s;
    total += patch(t, s, 0.0, t) + patch(t, s, t, s) + patch(0.0, t, t, s);
    s = t;
  }
  return total;
}
}  // namespace

double cell_self_energy(double hx, double hy) {
  if (hx <= 0.0) throw std::invalid_argument("cell_self_energy: hx > 0");
  if (hy == 0.0) return std::log(hx) - 1.5;
  return cell_constant_2d(hx, hy);
}

double free_entropy(const GridMeasure& m) {
  if (!m.is_discretization()) return kNegInf;  // atomic: diagonal log 0
  const double cross = kernels::cross_log_sum(m.nodes(), m.masses());
  const auto& mass = m.masses();
  const auto& self = m.cell_self_energy();
  const double diag = kernels::block_sum(
      mass.size(), [&](std::size_t i) { return mass[i] * mass[i] * self[i]; });
  return cross + diag;
}

EnergyReport weighted_energy(const GridMeasure& m, const WeightFunction& w) {
  for (auto z : m.nodes())
    if (!w.domain().contains(z, 1e-12))
      throw std::invalid_argument("weighted_energy: measure not supported in the weight's domain");
  const double sigma = free_entropy(m);
  const auto& mass = m.masses();
  const auto& nodes = m.nodes();
  const double external = 2.0 * kernels::block_sum(mass.size(), [&](std::size_t i) {
    return -mass[i] * w.log_value(nodes[i]);
  });
  const double energy = (sigma == kNegInf) ? kPosInf : -sigma + external;
  return {sigma, energy, external, -energy};
}

std::vector<complexd> tensor_grid(const Rectangle& h, int n, int& nx, int& ny, double& hx,
                                  double& hy) {
  if (n < 16) throw std::invalid_argument("tensor_grid: n >= 16");
  std::vector<complexd> nodes;
  if (h.degenerate()) {
    nx = n;
    ny = 1;
    hx = h.width() / n;
    hy = 0.0;
    nodes.reserve(n);
    for (int i = 0; i < n; ++i) nodes.emplace_back(h.x_min + (i + 0.5) * hx, h.y_min);
    return nodes;
  }
  ny = std::max(2, static_cast<int>(std::lround(std::sqrt(n * h.height() / h.width()))));
  nx = std::max(2, static_cast<int>(std::lround(static_cast<double>(n) / ny)));
  hx = h.width() / nx;
  hy = h.height() / ny;
  nodes.reserve(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      nodes.emplace_back(h.x_min + (i + 0.5) * hx, h.y_min + (j + 0.5) * hy);
  return nodes;
}

GridMeasure grid_measure_from_density(const Rectangle& h, int n,
                                      const std::function<double(complexd)>& density,
                                      const std::string& label) {
  int nx, ny;
  double hx, hy;
  auto nodes = tensor_grid(h, n, nx, ny, hx, hy);
  std::vector<double> masses(nodes.size());
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = density(nodes[i]);
    if (v < 0.0) throw std::invalid_argument("grid_measure_from_density: negative density");
    masses[i] = v;
    total += v;
  }
  if (total <= 0.0) throw std::invalid_argument("grid_measure_from_density: zero density");
  for (double& m : masses) m /= total;
  GridMeasure g(std::move(nodes), std::move(masses), label);
  g.set_cell_self_energy(std::vector<double>(g.size(), cell_self_energy(hx, hy)));
  return g;
}

namespace {

// Euclidean projection onto the probability simplex (sorting-based)
void project_simplex(std::vector<double>& v, std::vector<double>& scratch) {
  scratch = v;
  std::sort(scratch.begin(), scratch.end(), std::greater<double>());
  double csum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < scratch.size(); ++j) {
    csum += scratch[j];
    const double t = (csum - 1.0) / (j + 1.0);
    if (scratch[j] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(0.0, x - theta);
}

double spectral_norm(const std::vector<double>& mat, std::size_t n) {
  std::vector<double> v(n), mv(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i));
  double norm = 0.0;
  for (int it = 0; it < 200; ++it) {
    kernels::symv(mat, n, v, mv);
    norm = std::sqrt(kernels::block_sum(n, [&](std::size_t i) { return mv[i] * mv[i]; }));
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = mv[i] / norm;
  }
  return norm;
}

// dense Gaussian elimination with partial pivoting; a (row-major) is destroyed
bool solve_dense(std::vector<double>& a, std::vector<double>& rhs, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::fabs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::fabs(a[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return false;
    if (piv != col) {
      for (std::size_t c = col; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    double acc = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * rhs[c];
    rhs[r] = acc / a[r * n + r];
  }
  return true;
}

// Exact equality-constrained solve on a candidate support: stationarity
// -2(Km)_i + 2q_i = lambda on S, sum m = 1.  Inner loop drops negative
// components.  Returns the full-length mass vector, or empty on failure.
std::vector<double> kkt_polish(const std::vector<double>& kernel, const std::vector<double>& q,
                               std::size_t nn, const std::vector<double>& m_cur) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < nn; ++i)
    if (m_cur[i] > 0.0) support.push_back(i);
  for (int round = 0; round < 40 && !support.empty(); ++round) {
    const std::size_t n = support.size();
    std::vector<double> a((n + 1) * (n + 1), 0.0), rhs(n + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c)
        a[r * (n + 1) + c] = -2.0 * kernel[support[r] * nn + support[c]];
      a[r * (n + 1) + n] = -1.0;
      rhs[r] = -2.0 * q[support[r]];
    }
    for (std::size_t c = 0; c < n; ++c) a[n * (n + 1) + c] = 1.0;
    rhs[n] = 1.0;
    if (!solve_dense(a, rhs, n + 1)) return {};
    bool feasible = true;
    std::vector<std::size_t> next;
    for (std::size_t r = 0; r < n; ++r) {
      if (rhs[r] < -1e-12)
        feasible = false;
      else
        next.push_back(support[r]);
    }
    if (feasible) {
      std::vector<double> m(nn, 0.0);
      double total = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double v = std::max(0.0, rhs[r]);
        m[support[r]] = v;
        total += v;
      }
      if (total <= 0.0) return {};
      for (double& v : m) v /= total;
      return m;
    }
    if (next.size() == support.size()) return {};  // no progress
    support.swap(next);
  }
  return {};
}

// max eigenvalue of P M P on the sum-zero subspace (P = centering projector),
// by power iteration on the shifted operator
double centered_lambda_max(const std::vector<double>& mat, std::size_t n, double shift) {
  std::vector<double> v(n), mv(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(1.7 * static_cast<double>(i) + 0.3);
  auto center = [&](std::vector<double>& x) {
    double mean = 0.0;
    for (double xi : x) mean += xi;
    mean /= static_cast<double>(n);
    for (double& xi : x) xi -= mean;
  };
  center(v);
  double lam = 0.0;
  for (int it = 0; it < 300; ++it) {
    kernels::symv(mat, n, v, mv);
    center(mv);
    for (std::size_t i = 0; i < n; ++i) mv[i] += shift * v[i];
    double nrm = std::sqrt(kernels::block_sum(n, [&](std::size_t i) { return mv[i] * mv[i]; }));
    if (nrm == 0.0) return -shift;
    for (std::size_t i = 0; i < n; ++i) v[i] = mv[i] / nrm;
    lam = nrm;
  }
  return lam - shift;
}

}  // namespace

GridMeasure solve_equilibrium(const Rectangle& h, const WeightFunction& w, int n,
                              const EqOptions& opts, EqDiagnostics* diag) {
  int nx, ny;
  double hx, hy;
  auto nodes = tensor_grid(h, n, nx, ny, hx, hy);
  const std::size_t nn = nodes.size();
  const double self = cell_self_energy(hx, hy);

  std::vector<double> kernel;
  kernels::assemble_log_kernel(nodes, std::vector<double>(nn, self), kernel);
  std::vector<double> q(nn);
  for (std::size_t i = 0; i < nn; ++i) q[i] = -w.log_value(nodes[i]);

  const double knorm = spectral_norm(kernel, nn);
  const double step = 0.95 / (2.0 * knorm);

  std::vector<double> m(nn, 1.0 / static_cast<double>(nn));
  if (!opts.init.empty()) {
    if (opts.init.size() != nn)
      throw std::invalid_argument("solve_equilibrium: init size must match the grid");
    m = opts.init;
    std::vector<double> tmp(nn);
    project_simplex(m, tmp);
  }
  std::vector<double> y = m, m_prev = m, cand(nn), km(nn), grad(nn), scratch(nn);

  // f(m) = -m'Km + 2 q'm ; grad = -2Km + 2q
  auto objective_and_grad = [&](const std::vector<double>& x, std::vector<double>* g) {
    kernels::symv(kernel, nn, x, km);
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
      quad += x[i] * km[i];
      lin += q[i] * x[i];
    }
    if (g)
      for (std::size_t i = 0; i < nn; ++i) (*g)[i] = -2.0 * km[i] + 2.0 * q[i];
    return -quad + 2.0 * lin;
  };

  double fm = objective_and_grad(m, nullptr);
  double t = 1.0;
  bool converged = false;
  double pg_norm = kPosInf;
  int it = 0;
  std::vector<double> history;
  history.reserve(256);
  history.push_back(fm);
  bool monotone = true;

  for (it = 1; it <= opts.max_iters; ++it) {
    objective_and_grad(y, &grad);
    cand = y;
    for (std::size_t i = 0; i < nn; ++i) cand[i] -= step * grad[i];
    project_simplex(cand, scratch);
    double fc = objective_and_grad(cand, nullptr);
    if (fc > fm) {
      // accelerated step overshot: restart momentum, plain descent from m
      objective_and_grad(m, &grad);
      cand = m;
      for (std::size_t i = 0; i < nn; ++i) cand[i] -= step * grad[i];
      project_simplex(cand, scratch);
      fc = objective_and_grad(cand, nullptr);
      t = 1.0;
      if (fc > fm) {  // rounding floor; hold position
        cand = m;
        fc = fm;
      }
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < nn; ++i)
      y[i] = cand[i] + ((t - 1.0) / t_new) * (cand[i] - m[i]);
    m_prev.swap(m);
    m = cand;
    if (fc > fm + 1e-10) monotone = false;
    fm = fc;
    t = t_new;
    if (history.size() < 4096) history.push_back(fm);

    if (it % opts.check_every == 0) {
      objective_and_grad(m, &grad);
      cand = m;
      for (std::size_t i = 0; i < nn; ++i) cand[i] -= step * grad[i];
      project_simplex(cand, scratch);
      double s2 = 0.0;
      for (std::size_t i = 0; i < nn; ++i) {
        const double d = (m[i] - cand[i]) / step;
        s2 += d * d;
      }
      pg_norm = std::sqrt(s2);
      if (pg_norm < opts.tol) {
        converged = true;
        break;
      }
    }

    // Once the active set has settled, the minimizer on that face is the
    // solution of a dense equality-constrained system; accept the exact
    // solve when it keeps the descent and meets the gradient tolerance.
    if (it == 50 || it % 250 == 0) {
      auto polished = kkt_polish(kernel, q, nn, m);
      if (!polished.empty()) {
        const double fp = objective_and_grad(polished, &grad);
        if (fp <= fm + 1e-12) {
          cand = polished;
          for (std::size_t i = 0; i < nn; ++i) cand[i] -= step * grad[i];
          project_simplex(cand, scratch);
          double s2 = 0.0;
          for (std::size_t i = 0; i < nn; ++i) {
            const double d = (polished[i] - cand[i]) / step;
            s2 += d * d;
          }
          const double pg_pol = std::sqrt(s2);
          if (fp < fm || pg_pol < pg_norm) {
            m = std::move(polished);
            y = m;
            t = 1.0;
            fm = std::min(fm, fp);
            pg_norm = pg_pol;
            if (history.size() < 4096) history.push_back(fm);
            if (pg_norm < opts.tol) {
              converged = true;
              break;
            }
          }
        }
      }
    }
  }

  if (diag) {
    diag->iterations = std::min(it, opts.max_iters);
    diag->converged = converged;
    diag->pg_norm = pg_norm;
    diag->objective = fm;
    diag->objective_monotone = monotone;
    diag->objective_history = std::move(history);
    diag->kernel_lambda_max =
        opts.definiteness_probe ? centered_lambda_max(kernel, nn, knorm + 1.0) : 0.0;
  }

  double total = 0.0;
  for (double mi : m) total += mi;
  for (double& mi : m) mi /= total;
  GridMeasure out(std::move(nodes), std::move(m), "equilibrium");
  out.set_cell_self_energy(std::vector<double>(nn, self));
  out.set_converged(converged);
  return out;
}

namespace {
struct EqCache {
  std::map<std::string, std::shared_ptr<const GridMeasure>> entries;
  std::shared_mutex mutex;
};
EqCache& eq_cache() {
  static EqCache c;
  return c;
}
std::string cache_key(const Rectangle& h, const WeightFunction& w, int n) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g|%d|%016llx", h.x_min, h.x_max,
                h.y_min, h.y_max, n, static_cast<unsigned long long>(w.content_hash()));
  return buf;
}
}  // namespace

void clear_equilibrium_cache() {
  auto& c = eq_cache();
  std::unique_lock lock(c.mutex);
  c.entries.clear();
}

RateResult rate_functional_detail(const GridMeasure& m, const WeightFunction& phi,
                                  const Rectangle& h, int n) {
  const auto key = cache_key(h, phi, n);
  std::shared_ptr<const GridMeasure> eq;
  {
    auto& c = eq_cache();
    std::shared_lock lock(c.mutex);
    auto it = c.entries.find(key);
    if (it != c.entries.end()) eq = it->second;
  }
  if (!eq) {
    auto computed = std::make_shared<const GridMeasure>(solve_equilibrium(h, phi, n));
    auto& c = eq_cache();
    std::unique_lock lock(c.mutex);
    auto [it, inserted] = c.entries.emplace(key, computed);
    eq = it->second;
  }
  const double im = weighted_energy(m, phi).weighted_energy;
  const double ieq = weighted_energy(*eq, phi).weighted_energy;
  return {im - ieq, eq->converged()};
}

double rate_functional(const GridMeasure& m, const WeightFunction& phi, const Rectangle& h,
                       int n) {
  return rate_functional_detail(m, phi, h, n).value;
}

}  // namespace loggas
