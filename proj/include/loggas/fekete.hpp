#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "loggas/geometry.hpp"
#include "loggas/measures.hpp"
#include "loggas/weights.hpp"

namespace loggas {

struct FeketeOptions {
  int restarts = 4;
  int coord_sweeps = 30;       // cyclic coordinate-ascent passes
  int scan_points = 33;        // coarse bracketing scan per axis
  int golden_iters = 48;
  int grad_iters = 2000;       // projected-gradient polish steps
  double conv_tol = 1e-7;      // sup-norm of the accepted polish step
  double jitter = 0.05;        // restart jitter, relative to the short side
  int penalty_rounds = 28;     // constrained mode: penalty doublings
  double penalty_init = -1.0;  // < 0: use 10*d
  int feasibility_restarts = 6;
};

struct FeketeResult {
  Configuration configuration;  // canonicalized (sorted by Re, then Im)
  double log_wvdm_value;
  double delta_d;               // exp(2 * log_wvdm / (d(d-1)))
  int iterations;
  bool converged;
  std::vector<double> objective_history;  // per accepted improvement
};

/// Maximize log|VDM^w_d| over H^d: multistart cyclic coordinate ascent
/// (bracketing scan + golden section per axis) followed by projected-gradient
/// polish with backtracking; best of `restarts` runs, deterministic given the
/// seed.
FeketeResult solve_fekete(const Rectangle& h, const WeightFunction& w, int d,
                          const FeketeOptions& opts, std::uint64_t seed);

struct DiameterRow {
  int d;
  double delta_d;
  double log_wvdm;
  bool converged;
};

struct DiameterTable {
  std::vector<DiameterRow> rows;
  double delta_extrapolated;  // least-squares fit delta + a/d on the largest half
  double slope_a;
  std::vector<int> fit_ds;
  bool all_converged;
};

DiameterTable transfinite_diameter(const Rectangle& h, const WeightFunction& w,
                                   const std::vector<int>& d_list, const FeketeOptions& opts,
                                   std::uint64_t seed);

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(double gap, int n1, int n2, double eps)
      : std::runtime_error("no configuration meets the moment window: worst gap " +
                           std::to_string(gap) + " at moment (" + std::to_string(n1) + "," +
                           std::to_string(n2) + "), epsilon " + std::to_string(eps)),
        gap_(gap), n1_(n1), n2_(n2) {}
  double gap() const { return gap_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }

 private:
  double gap_;
  int n1_, n2_;
};

/// any d-point configuration strictly inside the moment window (used as chain
/// and optimizer seed); throws InfeasibleError when none is found
Configuration find_feasible(const Rectangle& h, const MomentNeighborhood& nbhd, int d,
                            std::uint64_t seed, const FeketeOptions& opts = {});

struct ConstrainedSupResult {
  Configuration configuration;
  double log_wvdm_value;  // sup of log|VDM^phi_d| over the window
  double w_value;         // exp(2 * value / (d(d-1)))
  double worst_gap;
  bool converged;
  int penalty_rounds_used;
};

/// sup of |VDM^phi_d|^{2/d(d-1)} over configurations whose empirical measure
/// lies strictly in the moment window: exterior quadratic penalty with
/// doubling coefficient, strict-feasibility filter on the output
ConstrainedSupResult constrained_sup_W(const Rectangle& h, const WeightFunction& phi,
                                       const MomentNeighborhood& nbhd, int d,
                                       const FeketeOptions& opts, std::uint64_t seed);

}  // namespace loggas
