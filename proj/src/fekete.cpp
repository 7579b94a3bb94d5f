#include "loggas/fekete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loggas/classical.hpp"
#include "loggas/kernels.hpp"
#include "loggas/rng.hpp"
#include "loggas/vdm.hpp"

namespace loggas {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

bool lex_less(const Configuration& a, const Configuration& b) {
  for (int i = 0; i < std::min(a.d(), b.d()); ++i) {
    const auto &za = a.points[i], &zb = b.points[i];
    if (za.real() != zb.real()) return za.real() < zb.real();
    if (za.imag() != zb.imag()) return za.imag() < zb.imag();
  }
  return a.d() < b.d();
}

// Maximizes obj_weight * (sum_{i<j} log|l_i - l_j| + d sum_i log w(l_i))
//           - rho * sum_t max(0, |m_t(kappa) - ref_t| - eps_pen)^2
// by per-point axis line searches (bracketing scan + golden section) and a
// joint clamped-gradient polish with backtracking.  Point moves are O(d) via
// cached per-point pair sums and running moment power sums.
class Engine {
 public:
  Engine(const Rectangle& h, const WeightFunction& w, int d, const FeketeOptions& opts)
      : h_(h), w_(w), d_(d), opts_(opts) {}

  void set_constraint(const MomentNeighborhood* nbhd, double eps_pen) {
    nbhd_ = nbhd;
    eps_pen_ = eps_pen;
    mom_.clear();
    if (nbhd_) {
      for (const auto& e : nbhd_->reference.entries) {
        if (e.n1 == 0 && e.n2 == 0) continue;
        mom_.push_back({e.n1, e.n2, e.value});
      }
    }
  }
  void set_rho(double rho) { rho_ = rho; }
  void set_objective_weight(double ow) { obj_weight_ = ow; }

  void init(std::vector<complexd> pts) {
    pts_ = std::move(pts);
    refresh_sums();
  }

  const std::vector<complexd>& points() const { return pts_; }

  double log_wvdm_only() const {
    Configuration c{pts_};
    double v = kernels::ref::pair_log_sum(pts_);
    if (w_.kind() != WeightKind::unit) {
      double s = 0.0;
      for (auto z : pts_) s += w_.log_value(z);
      v += d_ * s;
    }
    return v;
  }

  double violation() const { return violation_of(pow_sums_); }

  MomentGap worst_gap() const {
    MomentGap worst{0.0, 0, 0};
    for (std::size_t t = 0; t < mom_.size(); ++t) {
      const double gap = std::fabs(pow_sums_[t] / d_ - mom_[t].ref);
      if (gap > worst.gap) worst = {gap, mom_[t].n1, mom_[t].n2};
    }
    return worst;
  }

  double objective() const {
    return obj_weight_ * log_wvdm_only() - rho_ * violation();
  }

  // one cyclic pass; returns the objective after the pass
  double coordinate_sweep(int* moves) {
    for (int i = 0; i < d_; ++i) {
      visit_axis(i, /*axis_x=*/true, moves);
      if (!h_.degenerate()) visit_axis(i, /*axis_x=*/false, moves);
    }
    refresh_sums();
    return objective();
  }

  // clamped gradient ascent with backtracking; returns last accepted move
  double gradient_polish(int iters, std::vector<double>* history, int* steps) {
    double f = objective();
    double alpha = 0.05 * h_.min_side();
    double last_move = std::numeric_limits<double>::infinity();
    std::vector<complexd> cand(pts_.size());
    for (int it = 0; it < iters; ++it) {
      const auto g = gradient();
      double gnorm2 = 0.0;
      for (double gi : g) gnorm2 += gi * gi;
      if (gnorm2 == 0.0) return 0.0;
      alpha = std::min(alpha * 2.0, 1.0);
      bool accepted = false;
      while (alpha > 1e-16) {
        double dirdot = 0.0, move = 0.0;
        for (int j = 0; j < d_; ++j) {
          complexd step(alpha * g[2 * j], h_.degenerate() ? 0.0 : alpha * g[2 * j + 1]);
          cand[j] = h_.clamp(pts_[j] + step);
          const complexd dz = cand[j] - pts_[j];
          dirdot += g[2 * j] * dz.real() + g[2 * j + 1] * dz.imag();
          move = std::max(move, std::max(std::fabs(dz.real()), std::fabs(dz.imag())));
        }
        if (dirdot > 0.0 && objective_at(cand) > f + 1e-4 * dirdot) {
          pts_.swap(cand);
          refresh_sums();
          f = objective();
          if (history) history->push_back(f);
          if (steps) ++*steps;
          last_move = move;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) return 0.0;  // stationary within line-search resolution
      if (last_move < opts_.conv_tol) return last_move;
    }
    return last_move;
  }

 private:
  struct Mom {
    int n1, n2;
    double ref;
  };

  void refresh_sums() {
    pow_sums_.assign(mom_.size(), 0.0);
    for (std::size_t t = 0; t < mom_.size(); ++t)
      for (auto z : pts_)
        pow_sums_[t] += pow_int(z.real(), mom_[t].n1) * pow_int(z.imag(), mom_[t].n2);
  }

  double violation_of(const std::vector<double>& sums) const {
    double v = 0.0;
    for (std::size_t t = 0; t < mom_.size(); ++t) {
      const double excess = std::fabs(sums[t] / d_ - mom_[t].ref) - eps_pen_;
      if (excess > 0.0) v += excess * excess;
    }
    return v;
  }

  double pair_sum_excluding(int i, complexd at) const {
    double acc = 0.0;
    for (int j = 0; j < d_; ++j) {
      if (j == i) continue;
      const complexd diff = at - pts_[j];
      const double r2 = std::norm(diff);
      if (r2 == 0.0) return kNegInf;
      acc += 0.5 * std::log(r2);
    }
    return acc;
  }

  // partial objective for point i placed at `at`, with the other points fixed
  double point_value(int i, complexd at, const std::vector<double>& base_pows) const {
    double v = 0.0;
    if (obj_weight_ != 0.0) {
      const double pair = pair_sum_excluding(i, at);
      if (pair == kNegInf) return kNegInf;
      v = obj_weight_ * (pair + d_ * w_.log_value(at));
    }
    if (rho_ != 0.0 && !mom_.empty()) {
      double pv = 0.0;
      for (std::size_t t = 0; t < mom_.size(); ++t) {
        const double s =
            base_pows[t] + pow_int(at.real(), mom_[t].n1) * pow_int(at.imag(), mom_[t].n2);
        const double excess = std::fabs(s / d_ - mom_[t].ref) - eps_pen_;
        if (excess > 0.0) pv += excess * excess;
      }
      v -= rho_ * pv;
    }
    return v;
  }

  void visit_axis(int i, bool axis_x, int* moves) {
    std::vector<double> base_pows(mom_.size());
    for (std::size_t t = 0; t < mom_.size(); ++t)
      base_pows[t] = pow_sums_[t] -
                     pow_int(pts_[i].real(), mom_[t].n1) * pow_int(pts_[i].imag(), mom_[t].n2);
    const double lo = axis_x ? h_.x_min : h_.y_min;
    const double hi = axis_x ? h_.x_max : h_.y_max;
    auto place = [&](double c) {
      return axis_x ? complexd(c, pts_[i].imag()) : complexd(pts_[i].real(), c);
    };
    auto eval = [&](double c) { return point_value(i, place(c), base_pows); };

    const double cur = axis_x ? pts_[i].real() : pts_[i].imag();
    double best_c = cur, best_v = eval(cur);

    const int ns = opts_.scan_points;
    int best_idx = -1;
    for (int s = 0; s < ns; ++s) {
      const double c = lo + (hi - lo) * s / (ns - 1.0);
      const double v = eval(c);
      if (v > best_v) {
        best_v = v;
        best_c = c;
        best_idx = s;
      }
    }
    // golden refine inside the bracket around the best scan point
    double a = lo, b = hi;
    if (best_idx >= 0) {
      a = lo + (hi - lo) * std::max(0, best_idx - 1) / (ns - 1.0);
      b = lo + (hi - lo) * std::min(ns - 1, best_idx + 1) / (ns - 1.0);
    } else {
      const double span = (hi - lo) / (ns - 1.0);
      a = std::max(lo, cur - span);
      b = std::min(hi, cur + span);
    }
    constexpr double kGr = 0.6180339887498949;
    double x1 = b - kGr * (b - a), x2 = a + kGr * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < opts_.golden_iters; ++it) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGr * (b - a);
        f1 = eval(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGr * (b - a);
        f2 = eval(x2);
      }
      const double fx = std::max(f1, f2);
      if (fx > best_v) {
        best_v = fx;
        best_c = (f1 > f2) ? x1 : x2;
      }
    }
    if (best_c != cur && best_v > eval(cur)) {
      pts_[i] = place(best_c);
      for (std::size_t t = 0; t < mom_.size(); ++t)
        pow_sums_[t] = base_pows[t] + pow_int(pts_[i].real(), mom_[t].n1) *
                                          pow_int(pts_[i].imag(), mom_[t].n2);
      if (moves) ++*moves;
    }
  }

  std::vector<double> gradient() const {
    std::vector<double> g(2 * d_, 0.0);
    if (obj_weight_ != 0.0) {
      for (int i = 0; i < d_; ++i) {
        double gx = 0.0, gy = 0.0;
        for (int j = 0; j < d_; ++j) {
          if (j == i) continue;
          const complexd diff = pts_[i] - pts_[j];
          const double r2 = std::norm(diff);
          gx += diff.real() / r2;
          gy += diff.imag() / r2;
        }
        if (w_.kind() != WeightKind::unit) {
          const auto gl = w_.grad_log(pts_[i]);
          gx += d_ * gl[0];
          gy += d_ * gl[1];
        }
        g[2 * i] = obj_weight_ * gx;
        g[2 * i + 1] = obj_weight_ * gy;
      }
    }
    if (rho_ != 0.0) {
      for (std::size_t t = 0; t < mom_.size(); ++t) {
        const double gap = pow_sums_[t] / d_ - mom_[t].ref;
        const double excess = std::fabs(gap) - eps_pen_;
        if (excess <= 0.0) continue;
        const double coef = -rho_ * 2.0 * excess * (gap > 0 ? 1.0 : -1.0) / d_;
        for (int i = 0; i < d_; ++i) {
          const double x = pts_[i].real(), y = pts_[i].imag();
          if (mom_[t].n1 > 0)
            g[2 * i] += coef * mom_[t].n1 * pow_int(x, mom_[t].n1 - 1) * pow_int(y, mom_[t].n2);
          if (mom_[t].n2 > 0)
            g[2 * i + 1] += coef * mom_[t].n2 * pow_int(x, mom_[t].n1) * pow_int(y, mom_[t].n2 - 1);
        }
      }
    }
    return g;
  }

  double objective_at(const std::vector<complexd>& cand) const {
    double v = 0.0;
    if (obj_weight_ != 0.0) {
      const double pair = kernels::ref::pair_log_sum(cand);
      if (pair == kNegInf) return kNegInf;
      double s = 0.0;
      if (w_.kind() != WeightKind::unit)
        for (auto z : cand) s += w_.log_value(z);
      v = obj_weight_ * (pair + d_ * s);
    }
    if (rho_ != 0.0 && !mom_.empty()) {
      std::vector<double> sums(mom_.size(), 0.0);
      for (std::size_t t = 0; t < mom_.size(); ++t)
        for (auto z : cand)
          sums[t] += pow_int(z.real(), mom_[t].n1) * pow_int(z.imag(), mom_[t].n2);
      v -= rho_ * violation_of(sums);
    }
    return v;
  }

  const Rectangle& h_;
  const WeightFunction& w_;
  int d_;
  const FeketeOptions& opts_;
  const MomentNeighborhood* nbhd_ = nullptr;
  double eps_pen_ = 0.0;
  double rho_ = 0.0;
  double obj_weight_ = 1.0;
  std::vector<complexd> pts_;
  std::vector<Mom> mom_;
  std::vector<double> pow_sums_;
};

std::vector<complexd> jittered_start(const Rectangle& h, int d, Rng& rng, double jitter) {
  auto pts = lobatto_start(h, d);
  const double jx = jitter * h.width();
  const double jy = h.degenerate() ? 0.0 : jitter * h.height();
  for (auto& z : pts)
    z = h.clamp(z + complexd(rng.uniform(-jx, jx), jy == 0.0 ? 0.0 : rng.uniform(-jy, jy)));
  return pts;
}

struct RunOutcome {
  Configuration config;
  double value = kNegInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

RunOutcome run_unconstrained(const Rectangle& h, const WeightFunction& w, int d,
                             const FeketeOptions& opts, std::vector<complexd> start) {
  Engine eng(h, w, d, opts);
  eng.init(std::move(start));
  RunOutcome out;
  double prev = kNegInf;
  for (int s = 0; s < opts.coord_sweeps; ++s) {
    int moves = 0;
    const double f = eng.coordinate_sweep(&moves);
    out.history.push_back(f);
    out.iterations += moves;
    if (moves == 0 || (prev != kNegInf && f - prev < 1e-12)) break;
    prev = f;
  }
  int steps = 0;
  const double last_move = eng.gradient_polish(opts.grad_iters, &out.history, &steps);
  out.iterations += steps;
  out.converged = last_move <= opts.conv_tol;
  out.config = Configuration{eng.points()}.canonical();
  out.value = eng.log_wvdm_only();
  return out;
}

}  // namespace

FeketeResult solve_fekete(const Rectangle& h, const WeightFunction& w, int d,
                          const FeketeOptions& opts, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("solve_fekete: d >= 2");
  const int r = std::max(1, opts.restarts);
  std::vector<RunOutcome> outs(r);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < r; ++i) {
    std::vector<complexd> start;
    if (i == 0) {
      start = lobatto_start(h, d);
    } else {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
      start = jittered_start(h, d, rng, opts.jitter);
    }
    outs[i] = run_unconstrained(h, w, d, opts, std::move(start));
  }
  int best = 0;
  for (int i = 1; i < r; ++i) {
    if (outs[i].value > outs[best].value ||
        (outs[i].value == outs[best].value && lex_less(outs[i].config, outs[best].config)))
      best = i;
  }
  const auto& b = outs[best];
  FeketeResult res;
  res.configuration = b.config;
  res.log_wvdm_value = b.value;
  res.delta_d = std::exp(2.0 * b.value / (static_cast<double>(d) * (d - 1)));
  res.iterations = b.iterations;
  res.converged = b.converged;
  res.objective_history = b.history;
  return res;
}

DiameterTable transfinite_diameter(const Rectangle& h, const WeightFunction& w,
                                   const std::vector<int>& d_list, const FeketeOptions& opts,
                                   std::uint64_t seed) {
  if (d_list.empty()) throw std::invalid_argument("transfinite_diameter: empty d_list");
  for (std::size_t i = 0; i + 1 < d_list.size(); ++i)
    if (d_list[i] >= d_list[i + 1])
      throw std::invalid_argument("transfinite_diameter: d_list must be increasing");
  DiameterTable table;
  table.all_converged = true;
  for (int d : d_list) {
    const auto res = solve_fekete(h, w, d, opts, splitmix64(seed ^ static_cast<std::uint64_t>(d)));
    table.rows.push_back({d, res.delta_d, res.log_wvdm_value, res.converged});
    table.all_converged = table.all_converged && res.converged;
  }
  // least squares delta_d ~ delta + a/d over the largest half of the sweep
  const std::size_t nfit = (table.rows.size() + 1) / 2;
  const std::size_t first = table.rows.size() - nfit;
  double s11 = 0, s1x = 0, sxx = 0, s1y = 0, sxy = 0;
  for (std::size_t i = first; i < table.rows.size(); ++i) {
    const double x = 1.0 / table.rows[i].d;
    const double y = table.rows[i].delta_d;
    s11 += 1.0;
    s1x += x;
    sxx += x * x;
    s1y += y;
    sxy += x * y;
    table.fit_ds.push_back(table.rows[i].d);
  }
  const double det = s11 * sxx - s1x * s1x;
  if (table.fit_ds.size() < 2 || det == 0.0) {
    table.delta_extrapolated = table.rows.back().delta_d;
    table.slope_a = 0.0;
  } else {
    table.delta_extrapolated = (s1y * sxx - s1x * sxy) / det;
    table.slope_a = (s11 * sxy - s1x * s1y) / det;
  }
  return table;
}

Configuration find_feasible(const Rectangle& h, const MomentNeighborhood& nbhd, int d,
                            std::uint64_t seed, const FeketeOptions& opts) {
  if (d < 1) throw std::invalid_argument("find_feasible: d >= 1");
  const double eps = nbhd.epsilon;
  MomentGap best_gap{std::numeric_limits<double>::infinity(), 0, 0};

  for (int attempt = 0; attempt < std::max(1, opts.feasibility_restarts); ++attempt) {
    std::vector<complexd> start;
    if (attempt == 0) {
      start = lobatto_start(h, d);
    } else {
      Rng rng = Rng::stream(seed, 1000 + static_cast<std::uint64_t>(attempt));
      start = jittered_start(h, d, rng, opts.jitter * attempt);
    }
    Engine eng(h, WeightFunction::unit(h), d, opts);
    eng.set_constraint(&nbhd, 0.9 * eps);
    eng.set_rho(1.0);
    eng.set_objective_weight(0.0);  // descend on the violation alone
    eng.init(std::move(start));
    for (int s = 0; s < std::max(2, opts.coord_sweeps); ++s) {
      int moves = 0;
      eng.coordinate_sweep(&moves);
      if (eng.violation() == 0.0 || moves == 0) break;
    }
    eng.gradient_polish(opts.grad_iters, nullptr, nullptr);
    const auto gap = eng.worst_gap();
    if (gap.gap < best_gap.gap) best_gap = gap;
    if (gap.gap < 0.98 * eps) {
      // moment-only descent can land several points on the same scan
      // position; nudge exact duplicates apart (the moment shift is O(1e-7)
      // and leaves the strict window intact), then re-verify
      auto pts = eng.points();
      const double mid = 0.5 * (h.x_min + h.x_max);
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
          if (pts[i] == pts[j]) {
            const double nudge =
                1e-7 * h.width() * (1.0 + static_cast<double>(j) / pts.size());
            pts[j] = h.clamp(pts[j] +
                             complexd(pts[j].real() > mid ? -nudge : nudge, 0.0));
          }
      bool distinct = true;
      for (std::size_t i = 0; i < pts.size() && distinct; ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
          if (pts[i] == pts[j]) {
            distinct = false;
            break;
          }
      Configuration cfg{pts};
      if (distinct && max_moment_gap(empirical(cfg), nbhd).gap < 0.99 * eps) return cfg;
    }
  }
  throw InfeasibleError(best_gap.gap, best_gap.n1, best_gap.n2, eps);
}

ConstrainedSupResult constrained_sup_W(const Rectangle& h, const WeightFunction& phi,
                                       const MomentNeighborhood& nbhd, int d,
                                       const FeketeOptions& opts, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("constrained_sup_W: d >= 2");
  const double eps = nbhd.epsilon;
  const Configuration feas0 = find_feasible(h, nbhd, d, splitmix64(seed ^ 0xFEA5ULL), opts);

  struct Candidate {
    Configuration config;
    double value = kNegInf;
    bool converged = false;
    int rounds = 0;
  };
  const int r = std::max(1, opts.restarts);
  std::vector<Candidate> cands(r);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < r; ++i) {
    Engine eng(h, phi, d, opts);
    eng.set_constraint(&nbhd, 0.95 * eps);
    eng.set_objective_weight(1.0);
    std::vector<complexd> start = feas0.points;
    if (i > 0) {
      Rng rng = Rng::stream(seed, 2000 + static_cast<std::uint64_t>(i));
      const double j = 0.25 * opts.jitter * h.width();
      for (auto& z : start)
        z = h.clamp(z + complexd(rng.uniform(-j, j),
                                 h.degenerate() ? 0.0 : rng.uniform(-j, j)));
    }
    eng.init(std::move(start));

    Candidate best;
    double rho = opts.penalty_init > 0 ? opts.penalty_init : 10.0 * d;
    double prev_feasible_value = kNegInf;
    int stable = 0;
    for (int round = 0; round < std::max(1, opts.penalty_rounds); ++round) {
      eng.set_rho(rho);
      for (int s = 0; s < std::max(2, opts.coord_sweeps / 4); ++s) {
        int moves = 0;
        eng.coordinate_sweep(&moves);
        if (moves == 0) break;
      }
      const double last_move = eng.gradient_polish(std::max(10, opts.grad_iters / 2), nullptr,
                                                    nullptr);
      const Configuration cfg{eng.points()};
      if (in_neighborhood(empirical(cfg), nbhd)) {  // strict filter
        const double v = eng.log_wvdm_only();
        if (v > best.value) {
          best.value = v;
          best.config = cfg.canonical();
          best.converged = last_move <= opts.conv_tol;
          best.rounds = round + 1;
        }
        if (std::fabs(v - prev_feasible_value) < 1e-9 && ++stable >= 2) break;
        prev_feasible_value = v;
      }
      rho *= 2.0;
    }
    if (best.value == kNegInf) {
      // the optimizer never re-entered the window; fall back to the feasible seed
      best.config = feas0.canonical();
      best.value = log_wvdm(feas0, phi);
      best.converged = false;
      best.rounds = opts.penalty_rounds;
    }
    cands[i] = std::move(best);
  }

  int best = 0;
  for (int i = 1; i < r; ++i)
    if (cands[i].value > cands[best].value ||
        (cands[i].value == cands[best].value && lex_less(cands[i].config, cands[best].config)))
      best = i;

  const auto& b = cands[best];
  ConstrainedSupResult res;
  res.configuration = b.config;
  res.log_wvdm_value = b.value;
  res.w_value = std::exp(2.0 * b.value / (static_cast<double>(d) * (d - 1)));
  res.worst_gap = max_moment_gap(empirical(b.config), nbhd).gap;
  res.converged = b.converged;
  res.penalty_rounds_used = b.rounds;
  return res;
}

}  // namespace loggas
