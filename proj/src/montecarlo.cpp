#include "loggas/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "loggas/classical.hpp"
#include "loggas/fekete.hpp"
#include "loggas/kernels.hpp"
#include "loggas/quadrature.hpp"
#include "loggas/vdm.hpp"

namespace loggas {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const std::size_t i =
      static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * (v.size() - 1));
  return v[i];
}

struct Stats {
  double mean = 0.0;
  double se = 0.0;
  double ess = 0.0;
};

// batch-means standard error (guards against chain autocorrelation)
Stats batch_stats(const std::vector<double>& x, int batches) {
  Stats s;
  const std::size_t n = x.size();
  if (n == 0) return s;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  s.mean = mean;
  if (n < 4) return s;
  const int b = std::max(2, std::min<int>(batches, static_cast<int>(n / 2)));
  const std::size_t len = n / b;
  double var_bm = 0.0;
  for (int i = 0; i < b; ++i) {
    double m = 0.0;
    for (std::size_t j = i * len; j < (i + 1) * len; ++j) m += x[j];
    m /= static_cast<double>(len);
    var_bm += (m - mean) * (m - mean);
  }
  var_bm /= (b - 1.0);
  s.se = std::sqrt(var_bm / b);
  double var_x = 0.0;
  for (double v : x) var_x += (v - mean) * (v - mean);
  var_x /= (n - 1.0);
  s.ess = (s.se > 0.0) ? std::min<double>(static_cast<double>(n), var_x / (s.se * s.se))
                       : static_cast<double>(n);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// BaseMeasure
// ---------------------------------------------------------------------------

BaseMeasure BaseMeasure::lebesgue(const Rectangle& h) {
  BaseMeasure m(h);
  m.total_mass_ = h.lebesgue_mass();
  m.t_ = 3.0;
  // corner disc: quarter area pi r^2/4 >= r^3 for r <= pi/4; on an interval
  // the end overlap is r >= r^3 for r <= 1.  r0 sits 5% inside the equality
  // radius so the numerical certification has margin.
  m.r0_ = 0.95 * (h.degenerate() ? std::min(1.0, h.width() / 2.0)
                                 : std::min(M_PI / 4.0, h.min_side() / 2.0));
  m.validate_density_condition();
  return m;
}

BaseMeasure BaseMeasure::density_grid(const Rectangle& h, int nx, int ny,
                                      std::vector<double> values) {
  if (nx < 1 || ny < 1 || (h.degenerate() && ny != 1))
    throw std::invalid_argument("density_grid: bad grid shape");
  if (static_cast<std::size_t>(nx) * ny != values.size())
    throw std::invalid_argument("density_grid: values size mismatch");
  BaseMeasure m(h);
  m.nx_ = nx;
  m.ny_ = ny;
  m.values_ = std::move(values);
  const double cell = h.degenerate() ? h.width() / nx : (h.width() / nx) * (h.height() / ny);
  m.cell_cum_.resize(m.values_.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < m.values_.size(); ++i) {
    if (m.values_[i] < 0.0) throw std::invalid_argument("density_grid: negative density");
    cum += m.values_[i] * cell;
    m.cell_cum_[i] = cum;
  }
  m.total_mass_ = cum;
  if (!(cum > 0.0)) throw std::invalid_argument("density_grid: zero total mass");
  // search for certifiable (T, r0)
  bool found = false;
  for (double r0 : {h.min_side() > 0 ? h.min_side() / 2.0 : h.width() / 2.0,
                    h.width() / 4.0, h.width() / 8.0}) {
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
      m.t_ = t;
      m.r0_ = r0;
      try {
        m.validate_density_condition();
        found = true;
      } catch (const std::invalid_argument&) {
        found = false;
      }
      if (found) break;
    }
    if (found) break;
  }
  if (!found)
    throw std::invalid_argument(
        "density_grid: density violates the disc-mass condition tau(D(z,r)) >= r^T "
        "for every tried (T, r0); measure rejected");
  return m;
}

void BaseMeasure::validate_density_condition() {
  const auto& h = domain_;
  const int nc = 9;
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < (h.degenerate() ? 1 : nc); ++j) {
      const complexd c(h.x_min + h.width() * i / (nc - 1.0),
                       h.degenerate() ? h.y_min : h.y_min + h.height() * j / (nc - 1.0));
      for (double r = r0_; r > r0_ / 9.0; r *= 0.5) {
        if (disc_mass(c, r) < std::pow(r, t_) * (1.0 - 1e-9))
          throw std::invalid_argument("base measure violates the disc-mass condition at (" +
                                      std::to_string(c.real()) + "," + std::to_string(c.imag()) +
                                      "), r=" + std::to_string(r));
      }
    }
  }
}

double BaseMeasure::disc_mass(complexd center, double r) const {
  const auto& h = domain_;
  if (r <= 0.0) return 0.0;
  if (h.degenerate()) {
    const double lo = std::max(h.x_min, center.real() - r);
    const double hi = std::min(h.x_max, center.real() + r);
    if (hi <= lo) return 0.0;
    if (is_lebesgue()) return hi - lo;
    // sum density over overlapped cells
    const double hx = h.width() / nx_;
    double acc = 0.0;
    for (int i = 0; i < nx_; ++i) {
      const double a = std::max(lo, h.x_min + i * hx);
      const double b = std::min(hi, h.x_min + (i + 1) * hx);
      if (b > a) acc += values_[i] * (b - a);
    }
    return acc;
  }
  if (is_lebesgue()) {
    // integrate chord heights over x (Simpson)
    const double lo = std::max(h.x_min, center.real() - r);
    const double hi = std::min(h.x_max, center.real() + r);
    if (hi <= lo) return 0.0;
    const int n = 2048;
    const double dx = (hi - lo) / n;
    auto chord = [&](double x) {
      const double t = r * r - (x - center.real()) * (x - center.real());
      if (t <= 0.0) return 0.0;
      const double half = std::sqrt(t);
      return std::max(0.0, std::min(h.y_max, center.imag() + half) -
                               std::max(h.y_min, center.imag() - half));
    };
    double acc = chord(lo) + chord(hi);
    for (int i = 1; i < n; ++i) acc += chord(lo + i * dx) * ((i % 2) ? 4.0 : 2.0);
    return acc * dx / 3.0;
  }
  // density grid: 4x4 subcell coverage
  const double hx = h.width() / nx_, hy = h.height() / ny_;
  double acc = 0.0;
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const double v = values_[static_cast<std::size_t>(j) * nx_ + i];
      if (v == 0.0) continue;
      int inside = 0;
      for (int si = 0; si < 4; ++si)
        for (int sj = 0; sj < 4; ++sj) {
          const complexd p(h.x_min + (i + (si + 0.5) / 4.0) * hx,
                           h.y_min + (j + (sj + 0.5) / 4.0) * hy);
          if (std::abs(p - center) <= r) ++inside;
        }
      acc += v * hx * hy * inside / 16.0;
    }
  }
  return acc;
}

double BaseMeasure::log_density(complexd z) const {
  if (is_lebesgue()) return 0.0;
  const auto& h = domain_;
  const int i = std::clamp(static_cast<int>((z.real() - h.x_min) / h.width() * nx_), 0, nx_ - 1);
  const int j = h.degenerate() ? 0
                               : std::clamp(static_cast<int>((z.imag() - h.y_min) / h.height() * ny_),
                                            0, ny_ - 1);
  const double v = values_[static_cast<std::size_t>(j) * nx_ + i];
  return v > 0.0 ? std::log(v) : kNegInf;
}

complexd BaseMeasure::sample(Rng& rng) const {
  const auto& h = domain_;
  if (is_lebesgue()) {
    return {rng.uniform(h.x_min, h.x_max),
            h.degenerate() ? h.y_min : rng.uniform(h.y_min, h.y_max)};
  }
  const double u = rng.uniform() * total_mass_;
  const auto it = std::lower_bound(cell_cum_.begin(), cell_cum_.end(), u);
  const std::size_t idx = static_cast<std::size_t>(it - cell_cum_.begin());
  const int i = static_cast<int>(idx % nx_);
  const int j = static_cast<int>(idx / nx_);
  const double hx = h.width() / nx_;
  const double hy = h.degenerate() ? 0.0 : h.height() / ny_;
  return {h.x_min + (i + rng.uniform()) * hx,
          h.degenerate() ? h.y_min : h.y_min + (j + rng.uniform()) * hy};
}

// ---------------------------------------------------------------------------
// Metropolis chains and thermodynamic integration
// ---------------------------------------------------------------------------

namespace {

struct WindowSpec {
  std::vector<int> n1, n2;
  std::vector<double> ref;
  double eps = 0.0;

  explicit WindowSpec(const MomentNeighborhood& nb) : eps(nb.epsilon) {
    for (const auto& e : nb.reference.entries) {
      if (e.n1 == 0 && e.n2 == 0) continue;
      n1.push_back(e.n1);
      n2.push_back(e.n2);
      ref.push_back(e.value);
    }
  }
  std::size_t size() const { return ref.size(); }
};

struct ChainEnv {
  const Rectangle* h;
  const BaseMeasure* tau;
  const WeightFunction* phi;  // may be unit
  int d;
  double beta;
  const WindowSpec* win = nullptr;  // nullptr: unconstrained
};

class Chain {
 public:
  Chain(const ChainEnv& env, std::vector<complexd> pts, Rng rng)
      : env_(env), pts_(std::move(pts)), rng_(rng) {
    sigma_ = 0.25 * env_.h->width();
    if (env_.win) {
      pow_.assign(env_.win->size(), 0.0);
      refresh_pows();
    }
    refresh_logs();
  }

  double max_gap() const {
    double g = 0.0;
    for (std::size_t t = 0; t < pow_.size(); ++t)
      g = std::max(g, std::fabs(pow_[t] / env_.d - env_.win->ref[t]));
    return g;
  }
  bool in_window() const { return env_.win && max_gap() < env_.win->eps; }
  double x_value() const { return pair_sum_ + env_.d * wsum_; }

  /// one systematic sweep; soft_rho <= 0 means hard rejection at win->eps
  void sweep(double soft_rho, bool adapt) {
    int accepted = 0;
    for (int j = 0; j < env_.d; ++j) {
      ++proposals_;
      const complexd old = pts_[j];
      const complexd cand(old.real() + sigma_ * rng_.normal(),
                          env_.h->degenerate() ? old.imag()
                                               : old.imag() + sigma_ * rng_.normal());
      if (!env_.h->contains(cand)) continue;  // boundary rejection
      double dpair = 0.0;
      bool coincident = false;
      for (int i = 0; i < env_.d; ++i) {
        if (i == j) continue;
        const double rn = std::norm(cand - pts_[i]);
        if (rn == 0.0) {
          coincident = true;
          break;
        }
        dpair += 0.5 * std::log(rn) - 0.5 * std::log(std::norm(old - pts_[i]));
      }
      if (coincident) continue;  // -inf log-density, auto-reject
      const double dw = (env_.phi->kind() == WeightKind::unit)
                            ? 0.0
                            : env_.phi->log_value(cand) - env_.phi->log_value(old);
      double dlogt = env_.beta * (dpair + env_.d * dw) +
                     (env_.tau->is_lebesgue()
                          ? 0.0
                          : env_.tau->log_density(cand) - env_.tau->log_density(old));
      double pen_old = 0.0, pen_new = 0.0;
      if (env_.win) {
        bool reject = false;
        for (std::size_t t = 0; t < pow_.size(); ++t) {
          const double pn = pow_[t] -
                            pow_int(old.real(), env_.win->n1[t]) * pow_int(old.imag(), env_.win->n2[t]) +
                            pow_int(cand.real(), env_.win->n1[t]) *
                                pow_int(cand.imag(), env_.win->n2[t]);
          const double gap_new = std::fabs(pn / env_.d - env_.win->ref[t]);
          const double gap_old = std::fabs(pow_[t] / env_.d - env_.win->ref[t]);
          if (soft_rho > 0.0) {
            const double en = std::max(0.0, gap_new - env_.win->eps);
            const double eo = std::max(0.0, gap_old - env_.win->eps);
            pen_new += en * en;
            pen_old += eo * eo;
          } else if (gap_new >= env_.win->eps) {
            reject = true;
            break;
          }
          pow_scratch_[t] = pn;
        }
        if (reject) continue;
        if (soft_rho > 0.0) dlogt -= soft_rho * (pen_new - pen_old);
      }
      if (dlogt < 0.0 && std::log(rng_.uniform() + 1e-300) >= dlogt) continue;
      // accept
      if (env_.win) pow_.swap(pow_scratch_);
      pair_sum_ += dpair;
      wsum_ += dw;
      pts_[j] = cand;
      ++accepted;
    }
    accept_count_ += accepted;
    ++sweeps_;
    if (adapt && sweeps_ % 8 == 0) {
      const double acc = static_cast<double>(accept_count_) / proposals_;
      sigma_ = std::clamp(sigma_ * std::exp(0.5 * (acc - target_acc_)),
                          1e-7 * env_.h->width(), 2.0 * env_.h->width());
      accept_count_ = 0;
      proposals_ = 0;
    }
    if (sweeps_ % 64 == 0) {  // drift hygiene on the running sums
      refresh_logs();
      if (env_.win) refresh_pows();
    }
  }

  void reset_counters() {
    accept_count_ = 0;
    proposals_ = 0;
  }
  double acceptance() const {
    return proposals_ ? static_cast<double>(accept_count_) / proposals_ : 0.0;
  }
  void set_target_acceptance(double a) { target_acc_ = a; }
  const std::vector<complexd>& points() const { return pts_; }

 private:
  void refresh_pows() {
    pow_scratch_.assign(env_.win->size(), 0.0);
    for (std::size_t t = 0; t < env_.win->size(); ++t) {
      double s = 0.0;
      for (auto z : pts_) s += pow_int(z.real(), env_.win->n1[t]) * pow_int(z.imag(), env_.win->n2[t]);
      pow_[t] = s;
    }
  }
  void refresh_logs() {
    pair_sum_ = kernels::ref::pair_log_sum(pts_);
    wsum_ = 0.0;
    if (env_.phi->kind() != WeightKind::unit)
      for (auto z : pts_) wsum_ += env_.phi->log_value(z);
  }

  ChainEnv env_;
  std::vector<complexd> pts_;
  Rng rng_;
  double sigma_;
  double target_acc_ = 0.3;
  double pair_sum_ = 0.0, wsum_ = 0.0;
  std::vector<double> pow_, pow_scratch_;
  long long accept_count_ = 0, proposals_ = 0;
  long long sweeps_ = 0;
};

struct ChainRun {
  Stats x;               // log|VDM^phi| statistics
  double acceptance = 0.0;
  std::vector<double> maxgaps;  // recorded when a window is present
  bool entered = true;
  int n_recorded = 0;
};

ChainRun run_chain(const ChainEnv& env, const std::vector<complexd>& init,
                   const ChainOptions& opts, Rng rng) {
  Chain chain(env, init, rng);
  chain.set_target_acceptance(opts.target_acceptance);
  // burn-in: adaptation; windowed chains use a ramped soft penalty
  const double rho_hi = env.win ? 64.0 / (env.win->eps * env.win->eps) : 0.0;
  for (int s = 0; s < opts.burn_sweeps; ++s) {
    double rho = 0.0;
    if (env.win) {
      const double frac = static_cast<double>(s) / std::max(1, opts.burn_sweeps);
      rho = rho_hi * std::min(1.0, 0.05 + frac);
    }
    chain.sweep(rho, /*adapt=*/true);
  }
  ChainRun out;
  if (env.win && !chain.in_window()) {
    int grace = 0;
    while (grace++ < opts.grace_sweeps && !chain.in_window()) chain.sweep(4.0 * rho_hi, false);
    if (!chain.in_window()) {
      out.entered = false;
      return out;
    }
  }
  chain.reset_counters();
  std::vector<double> xs;
  xs.reserve(opts.measure_sweeps / std::max(1, opts.thin) + 1);
  for (int s = 0; s < opts.measure_sweeps; ++s) {
    chain.sweep(/*soft_rho=*/0.0, /*adapt=*/false);  // hard rejection while measuring
    if (s % std::max(1, opts.thin) == 0) {
      xs.push_back(chain.x_value());
      if (env.win) out.maxgaps.push_back(chain.max_gap());
    }
  }
  out.x = batch_stats(xs, opts.batches);
  out.acceptance = chain.acceptance();
  out.n_recorded = static_cast<int>(xs.size());
  return out;
}

std::vector<complexd> chain_start(const Rectangle& h, int d, std::uint64_t seed,
                                  std::uint64_t idx) {
  auto pts = lobatto_start(h, d);
  Rng rng = Rng::stream(seed, idx + 7000);
  const double jx = 0.02 * h.width();
  const double jy = h.degenerate() ? 0.0 : 0.02 * h.height();
  for (auto& z : pts)
    z = h.clamp(z + complexd(rng.uniform(-jx, jx), jy == 0.0 ? 0.0 : rng.uniform(-jy, jy)));
  return pts;
}

struct TiResult {
  double integral = 0.0;
  double se = 0.0;
  std::int64_t n_samples = 0;
  std::vector<double> acceptance, ess;
  bool all_entered = true;
};

// integral over beta in [0,2] of E_beta[log|VDM^phi|] by trapezoid over
// independent per-beta chains
TiResult ti_integral(const ChainEnv& base_env, const std::vector<complexd>& init,
                     std::uint64_t seed, const ChainOptions& opts) {
  const int nb = std::max(2, opts.beta_points);
  std::vector<ChainRun> runs(nb);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < nb; ++i) {
    ChainEnv env = base_env;
    env.beta = 2.0 * i / (nb - 1.0);
    runs[i] = run_chain(env, init, opts, Rng::stream(seed, static_cast<std::uint64_t>(i)));
  }
  TiResult res;
  const double dbeta = 2.0 / (nb - 1.0);
  for (int i = 0; i < nb; ++i) {
    const double w = dbeta * ((i == 0 || i == nb - 1) ? 0.5 : 1.0);
    res.integral += w * runs[i].x.mean;
    res.se += w * w * runs[i].x.se * runs[i].x.se;
    res.n_samples += runs[i].n_recorded;
    res.acceptance.push_back(runs[i].acceptance);
    res.ess.push_back(runs[i].x.ess);
    res.all_entered = res.all_entered && runs[i].entered;
  }
  res.se = std::sqrt(res.se);
  return res;
}

void flag_acceptance(McDiagnostics& diag) {
  for (std::size_t i = 0; i < diag.acceptance.size(); ++i)
    if (diag.acceptance[i] < 0.1 || diag.acceptance[i] > 0.6)
      diag.flags.push_back("acceptance-out-of-range(chain " + std::to_string(i) + ": " +
                           std::to_string(diag.acceptance[i]) + ")");
}

// ---------------------------------------------------------------------------
// tensor quadrature for d <= 3
// ---------------------------------------------------------------------------

// integrand evaluated on a tensor grid over H^d; axes per point: 1 when H is
// degenerate, else 2
template <class F>
double tensor_integral(const Rectangle& h, int d, int n_axis, bool midpoint, F&& f) {
  const int dims = h.degenerate() ? d : 2 * d;
  std::vector<double> xs(n_axis), ws(n_axis), ys(n_axis), wy(n_axis);
  if (midpoint) {
    for (int i = 0; i < n_axis; ++i) {
      xs[i] = h.x_min + h.width() * (i + 0.5) / n_axis;
      ws[i] = h.width() / n_axis;
      if (!h.degenerate()) {
        ys[i] = h.y_min + h.height() * (i + 0.5) / n_axis;
        wy[i] = h.height() / n_axis;
      }
    }
  } else {
    const auto& [gx, gw] = gauss_legendre(n_axis);
    for (int i = 0; i < n_axis; ++i) {
      xs[i] = 0.5 * (h.x_min + h.x_max) + 0.5 * h.width() * gx[i];
      ws[i] = 0.5 * h.width() * gw[i];
      if (!h.degenerate()) {
        ys[i] = 0.5 * (h.y_min + h.y_max) + 0.5 * h.height() * gx[i];
        wy[i] = 0.5 * h.height() * gw[i];
      }
    }
  }
  long long total = 1;
  for (int k = 0; k < dims; ++k) total *= n_axis;
  return kernels::block_sum(static_cast<std::size_t>(total), [&](std::size_t flat) {
    std::vector<complexd> pts(d);
    double w = 1.0;
    std::size_t rest = flat;
    for (int j = 0; j < d; ++j) {
      const int ix = static_cast<int>(rest % n_axis);
      rest /= n_axis;
      double y = h.y_min;
      if (!h.degenerate()) {
        const int iy = static_cast<int>(rest % n_axis);
        rest /= n_axis;
        y = ys[iy];
        w *= wy[iy];
      }
      pts[j] = complexd(xs[ix], y);
      w *= ws[ix];
    }
    return w * f(pts);
  });
}

double quad_lambda(const std::vector<complexd>& pts, const WeightFunction& phi,
                   const BaseMeasure& tau, int d) {
  double lp = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double rn = std::norm(pts[i] - pts[j]);
      if (rn == 0.0) return 0.0;
      lp += std::log(rn);
    }
  }
  double ws = 0.0;
  if (phi.kind() != WeightKind::unit)
    for (auto z : pts) ws += phi.log_value(z);
  double dens = 0.0;
  if (!tau.is_lebesgue())
    for (auto z : pts) dens += tau.log_density(z);
  const double e = lp + 2.0 * d * ws + dens;
  return e == kNegInf ? 0.0 : std::exp(e);
}

McEstimate quad_log_Z(const Rectangle& h, const WeightFunction& phi, const BaseMeasure& tau,
                      int d, const ChainOptions& opts) {
  const int dims = h.degenerate() ? d : 2 * d;
  int n = opts.quad_points;
  if (n <= 0) n = (dims <= 2) ? 96 : (dims == 3 ? 64 : (dims == 4 ? 24 : 12));
  auto f = [&](const std::vector<complexd>& pts) { return quad_lambda(pts, phi, tau, d); };
  const double v = tensor_integral(h, d, n, false, f);
  const double v2 = tensor_integral(h, d, n / 2, false, f);
  McEstimate est;
  est.value = std::log(v);
  est.std_error = 0.0;
  est.method = "quadrature";
  long long total = 1;
  for (int k = 0; k < dims; ++k) total *= n;
  est.n_samples = total;
  est.diagnostics.truncation_error = std::fabs(std::log(v) - std::log(v2));
  est.diagnostics.base_term = d * std::log(tau.total_mass());
  return est;
}

McEstimate quad_log_J(const Rectangle& h, const WeightFunction& phi, const BaseMeasure& tau,
                      const MomentNeighborhood& nbhd, int d, const ChainOptions& opts) {
  const WindowSpec win(nbhd);
  auto f = [&](const std::vector<complexd>& pts) {
    for (std::size_t t = 0; t < win.size(); ++t) {
      double s = 0.0;
      for (auto z : pts) s += pow_int(z.real(), win.n1[t]) * pow_int(z.imag(), win.n2[t]);
      if (std::fabs(s / d - win.ref[t]) >= win.eps) return 0.0;
    }
    return quad_lambda(pts, phi, tau, d);
  };
  const int dims = h.degenerate() ? d : 2 * d;
  int n = opts.quad_points;
  if (n <= 0) n = (dims <= 2) ? 1024 : (dims == 3 ? 200 : (dims == 4 ? 48 : 16));
  const double v = tensor_integral(h, d, n, true, f);
  const double v2 = tensor_integral(h, d, n / 2, true, f);
  McEstimate est;
  est.value = std::log(v);
  est.std_error = 0.0;
  est.method = "quadrature";
  long long total = 1;
  for (int k = 0; k < dims; ++k) total *= n;
  est.n_samples = total;
  est.diagnostics.truncation_error = std::fabs(std::log(v) - std::log(v2));
  est.diagnostics.base_term = d * std::log(tau.total_mass());
  return est;
}

}  // namespace

// ---------------------------------------------------------------------------

McEstimate log_Z(const Rectangle& h, const WeightFunction& phi, const BaseMeasure& tau, int d,
                 std::uint64_t seed, const ChainOptions& opts) {
  if (d < 2) throw std::invalid_argument("log_Z: d >= 2");
  if (d <= 3 && !opts.force_mc) return quad_log_Z(h, phi, tau, d, opts);

  ChainEnv env{&h, &tau, &phi, d, 0.0, nullptr};
  const auto init = chain_start(h, d, seed, 1);
  const auto ti = ti_integral(env, init, splitmix64(seed ^ 0x5A5A17ULL), opts);

  McEstimate est;
  est.diagnostics.base_term = d * std::log(tau.total_mass());
  est.value = est.diagnostics.base_term + ti.integral;
  est.std_error = ti.se;
  est.n_samples = ti.n_samples;
  est.method = "thermodynamic";
  est.diagnostics.acceptance = ti.acceptance;
  est.diagnostics.ess = ti.ess;
  flag_acceptance(est.diagnostics);
  return est;
}

McEstimate log_J(const Rectangle& h, const WeightFunction& phi, const BaseMeasure& tau,
                 const MomentNeighborhood& nbhd, int d, std::uint64_t seed,
                 const ChainOptions& opts) {
  if (d < 2) throw std::invalid_argument("log_J: d >= 2");
  if (d <= 3 && !opts.force_mc) return quad_log_J(h, phi, tau, nbhd, d, opts);

  const Configuration feasible =
      find_feasible(h, nbhd, d, splitmix64(seed ^ 0xFEA51B1EULL));
  WindowSpec win(nbhd);

  // window mass at beta = 0: iid first rung, then a shrinking-window ladder of
  // beta = 0 chains, each confined to the previous window
  double log_mass = 0.0;
  double se2_mass = 0.0;
  int rungs = 0;
  std::int64_t mass_samples = 0;
  {
    Rng rng = Rng::stream(seed, "ladder-iid");
    std::vector<double> gaps(static_cast<std::size_t>(std::max(100, opts.ladder_iid)));
    for (auto& g : gaps) {
      double worst = 0.0;
      std::vector<complexd> pts(d);
      for (auto& z : pts) z = tau.sample(rng);
      for (std::size_t t = 0; t < win.size(); ++t) {
        double s = 0.0;
        for (auto z : pts) s += pow_int(z.real(), win.n1[t]) * pow_int(z.imag(), win.n2[t]);
        worst = std::max(worst, std::fabs(s / d - win.ref[t]));
      }
      g = worst;
    }
    mass_samples += static_cast<std::int64_t>(gaps.size());
    double cur_eps = std::max(nbhd.epsilon, percentile(gaps, 0.2));
    std::size_t hits = 0;
    for (double g : gaps)
      if (g < cur_eps) ++hits;
    if (hits == 0)
      throw std::runtime_error("log_J: no iid sample reached the first window rung; "
                               "the neighborhood is too tight (try a larger epsilon)");
    double p = static_cast<double>(hits) / gaps.size();
    log_mass += std::log(p);
    se2_mass += (1.0 - p) / (p * gaps.size());
    ++rungs;

    ChainOptions lopts = opts;
    lopts.measure_sweeps = opts.ladder_sweeps;
    while (cur_eps > nbhd.epsilon && rungs < 40) {
      MomentNeighborhood rung_nb(nbhd.reference, nbhd.k, cur_eps);
      WindowSpec rung_win(rung_nb);
      ChainEnv env{&h, &tau, &phi, d, 0.0, &rung_win};
      const auto run = run_chain(env, feasible.points, lopts,
                                 Rng::stream(seed, 40000 + static_cast<std::uint64_t>(rungs)));
      if (!run.entered || run.maxgaps.empty())
        throw std::runtime_error("log_J: ladder chain never entered the window rung; "
                                 "try a larger epsilon");
      double next_eps = std::max(nbhd.epsilon, percentile(run.maxgaps, 0.3));
      std::size_t h2 = 0;
      for (double g : run.maxgaps)
        if (g < next_eps) ++h2;
      if (h2 == 0) {
        next_eps = std::max(nbhd.epsilon, percentile(run.maxgaps, 0.7));
        h2 = 0;
        for (double g : run.maxgaps)
          if (g < next_eps) ++h2;
        if (h2 == 0)
          throw std::runtime_error("log_J: window ladder stalled; try a larger epsilon");
      }
      // batch-means error on the indicator series
      std::vector<double> ind(run.maxgaps.size());
      for (std::size_t i = 0; i < ind.size(); ++i) ind[i] = run.maxgaps[i] < next_eps ? 1.0 : 0.0;
      const auto st = batch_stats(ind, opts.batches);
      const double pr = st.mean;
      log_mass += std::log(pr);
      se2_mass += (st.se * st.se) / (pr * pr);
      mass_samples += static_cast<std::int64_t>(ind.size());
      cur_eps = next_eps;
      ++rungs;
    }
  }

  ChainEnv env{&h, &tau, &phi, d, 0.0, &win};
  const auto ti = ti_integral(env, feasible.points, splitmix64(seed ^ 0x1D2C3B4AULL), opts);
  if (!ti.all_entered)
    throw std::runtime_error("log_J: a measurement chain could not re-enter the window; "
                             "try a larger epsilon");

  McEstimate est;
  est.diagnostics.base_term = d * std::log(tau.total_mass());
  est.diagnostics.window_log_mass = log_mass;
  est.diagnostics.ladder_rungs = rungs;
  est.value = est.diagnostics.base_term + log_mass + ti.integral;
  est.std_error = std::sqrt(se2_mass + ti.se * ti.se);
  est.n_samples = ti.n_samples + mass_samples;
  est.method = "thermodynamic";
  est.diagnostics.acceptance = ti.acceptance;
  est.diagnostics.ess = ti.ess;
  flag_acceptance(est.diagnostics);
  return est;
}

McEstimate log_prob(const Rectangle& h, const WeightFunction& phi, const BaseMeasure& tau,
                    const MomentNeighborhood& nbhd, int d, std::uint64_t seed,
                    const ChainOptions& opts) {
  const auto j = log_J(h, phi, tau, nbhd, d, splitmix64(seed ^ fnv1a64("prob-J")), opts);
  const auto z = log_Z(h, phi, tau, d, splitmix64(seed ^ fnv1a64("prob-Z")), opts);
  McEstimate est;
  est.value = j.value - z.value;
  est.std_error = std::sqrt(j.std_error * j.std_error + z.std_error * z.std_error);
  est.n_samples = j.n_samples + z.n_samples;
  est.method = j.method == "quadrature" && z.method == "quadrature" ? "quadrature"
                                                                    : "thermodynamic";
  est.diagnostics = j.diagnostics;
  for (std::size_t i = 0; i < z.diagnostics.flags.size(); ++i)
    est.diagnostics.flags.push_back("Z:" + z.diagnostics.flags[i]);
  est.rate_check = -est.value / (static_cast<double>(d) * d);
  return est;
}

// ---------------------------------------------------------------------------
// Bernstein-Markov ratios
// ---------------------------------------------------------------------------

namespace {

complexd cheb_eval(const std::vector<double>& c, complexd s) {
  complexd t0(1.0, 0.0), t1 = s, acc(c[0], 0.0);
  if (c.size() > 1) acc += c[1] * s;
  for (std::size_t j = 2; j < c.size(); ++j) {
    const complexd t2 = 2.0 * s * t1 - t0;
    acc += c[j] * t2;
    t0 = t1;
    t1 = t2;
  }
  return acc;
}

double log_wkp(const Rectangle& h, const WeightFunction& w, int k,
               const std::vector<double>& coeffs, complexd z) {
  const complexd s((2.0 * z.real() - (h.x_min + h.x_max)) / h.width(),
                   2.0 * z.imag() / h.width());
  const double ap = std::abs(cheb_eval(coeffs, s));
  return k * w.log_value(z) + (ap > 0.0 ? std::log(ap) : kNegInf);
}

// sup over a 2048-per-axis grid plus one Newton polish step off the best grid
// point (a documented lower bound on the true sup)
double sup_log_wkp(const Rectangle& h, const WeightFunction& w, int k,
                   const std::vector<double>& coeffs) {
  const int n = 2048;
  kernels::MaxResult best{kNegInf, 0};
  double hx = h.width() / (n - 1.0);
  if (h.degenerate()) {
    best = kernels::grid_max(n, [&](std::size_t i) {
      return log_wkp(h, w, k, coeffs, {h.x_min + hx * static_cast<double>(i), h.y_min});
    });
  } else {
    const double hy = h.height() / (n - 1.0);
    best = kernels::grid_max(static_cast<std::size_t>(n) * n, [&](std::size_t flat) {
      const std::size_t i = flat % n, j = flat / n;
      return log_wkp(h, w, k, coeffs,
                     {h.x_min + hx * static_cast<double>(i),
                      h.y_min + hy * static_cast<double>(j)});
    });
  }
  // one Newton step per axis
  complexd zb;
  if (h.degenerate())
    zb = {h.x_min + hx * static_cast<double>(best.index), h.y_min};
  else
    zb = {h.x_min + hx * static_cast<double>(best.index % n),
          h.y_min + (h.height() / (n - 1.0)) * static_cast<double>(best.index / n)};
  double val = best.value;
  auto f = [&](complexd z) { return log_wkp(h, w, k, coeffs, z); };
  const double step = hx / 8.0;
  complexd zn = zb;
  for (int axis = 0; axis < (h.degenerate() ? 1 : 2); ++axis) {
    const complexd e = axis == 0 ? complexd(step, 0) : complexd(0, step);
    const double fp = f(zn + e), fm = f(zn - e), f0 = f(zn);
    const double g = (fp - fm) / (2.0 * step);
    const double hess = (fp - 2.0 * f0 + fm) / (step * step);
    if (hess < 0.0) {
      double delta = std::clamp(-g / hess, -hx, hx);
      complexd cand = zn + (axis == 0 ? complexd(delta, 0) : complexd(0, delta));
      cand = h.clamp(cand);
      if (f(cand) > val) {
        val = f(cand);
        zn = cand;
      }
    }
  }
  return val;
}

double l2_log_wkp(const Rectangle& h, const WeightFunction& w, const BaseMeasure& tau, int k,
                  const std::vector<double>& coeffs) {
  // int |w^k p|^2 dtau, returned as a log
  auto f2 = [&](complexd z) {
    const double lv = log_wkp(h, w, k, coeffs, z);
    return lv == kNegInf ? 0.0 : std::exp(2.0 * lv);
  };
  double total = 0.0;
  const auto& dom = tau.domain();
  if (tau.is_lebesgue()) {
    if (dom.degenerate()) {
      total = integrate_gl([&](double x) { return f2({x, dom.y_min}); }, dom.x_min, dom.x_max,
                           512);
    } else {
      const auto& [gx, gw] = gauss_legendre(128);
      for (int i = 0; i < 128; ++i) {
        const double x = 0.5 * (dom.x_min + dom.x_max) + 0.5 * dom.width() * gx[i];
        for (int j = 0; j < 128; ++j) {
          const double y = 0.5 * (dom.y_min + dom.y_max) + 0.5 * dom.height() * gx[j];
          total += gw[i] * gw[j] * f2({x, y});
        }
      }
      total *= 0.25 * dom.width() * dom.height();
    }
  } else {
    // midpoint over tau's cells with 4x subsampling along x
    const int nx = 4;
    const double mass = tau.total_mass();
    (void)mass;
    if (dom.degenerate()) {
      const int cells = 512;
      const double hx = dom.width() / cells;
      for (int i = 0; i < cells; ++i)
        for (int s = 0; s < nx; ++s) {
          const double x = dom.x_min + (i + (s + 0.5) / nx) * hx;
          total += std::exp(tau.log_density({x, dom.y_min})) * f2({x, dom.y_min}) * hx / nx;
        }
    } else {
      const int cells = 128;
      const double hx = dom.width() / cells, hy = dom.height() / cells;
      for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
          const complexd z(dom.x_min + (i + 0.5) * hx, dom.y_min + (j + 0.5) * hy);
          const double ld = tau.log_density(z);
          if (ld != kNegInf) total += std::exp(ld) * f2(z) * hx * hy;
        }
    }
  }
  return 0.5 * std::log(total);
}

}  // namespace

double bm_single_ratio(const Rectangle& h, const WeightFunction& w, const BaseMeasure& tau,
                       int k, const std::vector<double>& cheb_coeffs) {
  if (k < 1) throw std::invalid_argument("bm_single_ratio: degree must be positive");
  return std::exp(sup_log_wkp(h, w, k, cheb_coeffs) - l2_log_wkp(h, w, tau, k, cheb_coeffs));
}

std::vector<BmRow> bm_ratio(const Rectangle& h, const WeightFunction& w, const BaseMeasure& tau,
                            const std::vector<int>& k_list, int trials, std::uint64_t seed) {
  for (int k : k_list)
    if (k < 1) throw std::invalid_argument("bm_ratio: degrees must be positive");
  if (trials < 1) throw std::invalid_argument("bm_ratio: trials >= 1");
  std::vector<BmRow> rows;
  for (int k : k_list) {
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k) * 100000 + t);
      std::vector<double> coeffs(k + 1);
      for (auto& c : coeffs) c = rng.normal();
      const double sup = sup_log_wkp(h, w, k, coeffs);
      const double l2 = l2_log_wkp(h, w, tau, k, coeffs);
      best = std::max(best, std::exp(sup - l2));
    }
    rows.push_back({k, best, std::pow(best, 1.0 / k)});
  }
  return rows;
}

// ---------------------------------------------------------------------------

nlohmann::json McDiagnostics::to_json() const {
  nlohmann::json j;
  j["acceptance"] = acceptance;
  j["ess"] = ess;
  j["flags"] = flags;
  j["truncation_error"] = truncation_error;
  j["base_term"] = base_term;
  j["window_log_mass"] = window_log_mass;
  j["ladder_rungs"] = ladder_rungs;
  return j;
}

nlohmann::json McEstimate::to_json() const {
  nlohmann::json j;
  j["value"] = value;
  j["std_error"] = std_error;
  j["n_samples"] = n_samples;
  j["method"] = method;
  j["diagnostics"] = diagnostics.to_json();
  if (rate_check) j["rate_check"] = *rate_check;
  return j;
}

}  // namespace loggas
