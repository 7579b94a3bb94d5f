#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loggas/geometry.hpp"
#include "loggas/measures.hpp"
#include "loggas/weights.hpp"

namespace loggas {

/// Base measure tau on a rectangle with the disc-mass density condition
/// tau(D(z0,r)) >= r^T for all z0 in the domain and r <= r0, verified at
/// construction (worst case is a corner); construction fails loudly when the
/// condition cannot be certified.
class BaseMeasure {
 public:
  static BaseMeasure lebesgue(const Rectangle& h);
  /// piecewise-constant density on an nx x ny cell grid over h
  static BaseMeasure density_grid(const Rectangle& h, int nx, int ny,
                                  std::vector<double> values);

  const Rectangle& domain() const { return domain_; }
  double total_mass() const { return total_mass_; }
  double t_exponent() const { return t_; }
  double r0() const { return r0_; }

  double disc_mass(complexd center, double r) const;
  /// log density relative to Lebesgue (0 for the Lebesgue measure)
  double log_density(complexd z) const;
  complexd sample(Rng& rng) const;

  bool is_lebesgue() const { return values_.empty(); }

 private:
  explicit BaseMeasure(const Rectangle& h) : domain_(h) {}
  void validate_density_condition();

  Rectangle domain_;
  int nx_ = 0, ny_ = 0;
  std::vector<double> values_;  // empty for Lebesgue
  std::vector<double> cell_cum_;
  double total_mass_ = 0.0;
  double t_ = 0.0;
  double r0_ = 0.0;
};

struct ChainOptions {
  int beta_points = 21;       // trapezoid grid on [0, 2]
  int burn_sweeps = 600;
  int measure_sweeps = 3000;
  int thin = 2;               // record every `thin` sweeps
  int adapt_every = 10;       // sweeps between proposal-scale updates (burn-in)
  double target_acceptance = 0.3;
  int batches = 16;           // batch-means error estimate
  int ladder_iid = 20000;     // iid samples for the first window rung
  int ladder_sweeps = 2500;
  int grace_sweeps = 200;     // re-entry budget when burn-in drifts out
  bool force_mc = true;       // when false, d <= 3 uses tensor quadrature
  int quad_points = 0;        // 0: pick from dimension
};

struct McDiagnostics {
  std::vector<double> acceptance;   // per beta chain, after adaptation
  std::vector<double> ess;          // per beta chain
  std::vector<std::string> flags;   // non-silent anomalies
  double truncation_error = 0.0;    // quadrature refinement gap
  double base_term = 0.0;           // d log tau(H), or the window-mass term
  double window_log_mass = 0.0;     // log tau(G~)/tau(H)^d (log_J only)
  int ladder_rungs = 0;

  nlohmann::json to_json() const;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::string method;  // quadrature | thermodynamic
  McDiagnostics diagnostics;
  std::optional<double> rate_check;  // -value/d^2, filled by log_prob

  nlohmann::json to_json() const;
};

/// log Z_d = log of the squared weighted-Vandermonde integral over H^d
/// against tau^d.  Tensor Gauss-Legendre for d <= 3 unless opts.force_mc;
/// otherwise thermodynamic integration over beta in [0,2] with independent
/// Metropolis chains per beta point.
McEstimate log_Z(const Rectangle& h, const WeightFunction& phi, const BaseMeasure& tau, int d,
                 std::uint64_t seed, const ChainOptions& opts = {});

/// log J: same integral restricted to configurations whose empirical measure
/// lies in the moment window; the window mass at beta = 0 is estimated by a
/// deterministic shrinking-window ladder
McEstimate log_J(const Rectangle& h, const WeightFunction& phi, const BaseMeasure& tau,
                 const MomentNeighborhood& nbhd, int d, std::uint64_t seed,
                 const ChainOptions& opts = {});

/// log Prob_d(window) = log J - log Z, errors combined in quadrature;
/// rate_check = -value / d^2
McEstimate log_prob(const Rectangle& h, const WeightFunction& phi, const BaseMeasure& tau,
                    const MomentNeighborhood& nbhd, int d, std::uint64_t seed,
                    const ChainOptions& opts = {});

struct BmRow {
  int k;
  double max_ratio;    // max over trials of sup|w^k p| / L2(tau) norm
  double ratio_root;   // max_ratio^{1/k}
};

/// Bernstein-Markov ratio table over random degree-k polynomials with
/// standard-normal Chebyshev coefficients; sup norms on a 2048-per-axis grid
/// with one Newton polish step
std::vector<BmRow> bm_ratio(const Rectangle& h, const WeightFunction& w, const BaseMeasure& tau,
                            const std::vector<int>& k_list, int trials, std::uint64_t seed);

/// ratio sup|w^k p| / ||w^k p||_{L2(tau)} for one polynomial given by its
/// Chebyshev coefficients (basis of H's x-extent)
double bm_single_ratio(const Rectangle& h, const WeightFunction& w, const BaseMeasure& tau,
                       int k, const std::vector<double>& cheb_coeffs);

}  // namespace loggas
