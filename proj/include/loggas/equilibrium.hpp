#pragma once

#include <functional>
#include <vector>

#include "loggas/geometry.hpp"
#include "loggas/measures.hpp"
#include "loggas/weights.hpp"

namespace loggas {

/// Energy bookkeeping for a measure: sigma is the free entropy
/// (double log-integral), external_term = 2 int Q dnu, and
/// weighted_energy = -sigma + external_term.  log_delta_w = -weighted_energy
/// is meaningful when the measure is the computed equilibrium.
struct EnergyReport {
  double sigma;
  double weighted_energy;
  double external_term;
  double log_delta_w;
};

/// Free entropy of a grid measure.  Genuinely atomic measures have entropy
/// -inf (the diagonal); discretizations of continuous measures (built by the
/// grid builders, or explicitly flagged) get the corrected double sum where
/// cell i contributes mass_i^2 * (mean of log|z-t| over the cell pair).
double free_entropy(const GridMeasure& m);

EnergyReport weighted_energy(const GridMeasure& m, const WeightFunction& w);

/// mean of log|z-t| over a coincident cell pair; hy = 0 gives the 1-D value
/// log(hx) - 3/2
double cell_self_energy(double hx, double hy);

struct EqOptions {
  int max_iters = 60000;
  double tol = 1e-8;       // simplex-projected gradient norm
  int check_every = 25;
  bool definiteness_probe = true;
  std::vector<double> init;  // starting masses (empty: uniform)
};

struct EqDiagnostics {
  int iterations = 0;
  bool converged = false;
  double pg_norm = 0.0;
  double objective = 0.0;
  bool objective_monotone = true;
  double kernel_lambda_max = 0.0;  // max eigenvalue of the centered kernel; <= 0 means convex
  std::vector<double> objective_history;
};

/// Minimize the discretized weighted energy over probability vectors on a
/// tensor grid of ~n nodes (1-D grid when H is degenerate).  Accelerated
/// projected gradient with a monotonicity restart; the returned measure is
/// flagged non-converged when the iteration cap is hit.
GridMeasure solve_equilibrium(const Rectangle& h, const WeightFunction& w, int n,
                              const EqOptions& opts = {}, EqDiagnostics* diag = nullptr);

struct RateResult {
  double value;
  bool equilibrium_converged;
};

/// I(m) = I_phi(m) - I_phi(mu_eq(H, phi)); the equilibrium is cached per
/// (H, phi, n) behind a read-mostly lock
RateResult rate_functional_detail(const GridMeasure& m, const WeightFunction& phi,
                                  const Rectangle& h, int n);
double rate_functional(const GridMeasure& m, const WeightFunction& phi, const Rectangle& h,
                       int n);
void clear_equilibrium_cache();

/// midpoint tensor grid over H with ~n nodes; outputs the actual grid shape
/// and cell sizes
std::vector<complexd> tensor_grid(const Rectangle& h, int n, int& nx, int& ny, double& hx,
                                  double& hy);

/// discretization of density * Lebesgue on H (normalized), cell data attached
GridMeasure grid_measure_from_density(const Rectangle& h, int n,
                                      const std::function<double(complexd)>& density,
                                      const std::string& label = "density");

}  // namespace loggas
