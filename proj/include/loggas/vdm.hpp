#pragma once

#include <vector>

#include "loggas/geometry.hpp"
#include "loggas/measures.hpp"
#include "loggas/weights.hpp"

namespace loggas {

/// log|VDM_d(lambda)| = sum_{i<j} log|lambda_i - lambda_j|.
/// Returns -inf when two points coincide; never forms the product, so it is
/// overflow-safe for d into the hundreds.  d < 2 is a usage error.
double log_vdm(const Configuration& lambda);

/// log|VDM^w_d(lambda)| = log|VDM_d| + d * sum_i log w(lambda_i).
/// The squared-modulus log used by the energy asymptotics is twice this.
double log_wvdm(const Configuration& lambda, const WeightFunction& w);

/// gradient of log|VDM^w_d| in the 2d real coordinates
/// (d/dRe, d/dIm per point); throws on coincident points and for
/// non-differentiable weights
std::vector<double> grad_log_wvdm(const Configuration& lambda, const WeightFunction& w);

/// Markov constant for a rectangle by per-axis affine reduction to [-1,1]:
/// A = max over non-degenerate axes of 2/side.  Overridable wherever used.
double markov_constant(const Rectangle& h);

/// Lipschitz coefficient A*k^2 in |p(z1)-p(z2)| <= A k^2 ||p||_H |z1-z2|
double markov_lipschitz_bound(int degree, double a);
double markov_lipschitz_bound(int degree, const Rectangle& h);

/// Degree-growth constants of a nonnegative polynomial sequence on H^d:
/// each member has per-real-variable degree <= c1 * d^gamma1.
struct MarkovBoundParams {
  double a;       // Markov constant of H
  double c1;
  double gamma1;
};

/// parameters for Lambda_d = |VDM^w_d|^2 with polynomial w:
/// per-variable degree <= 2(d-1) + 2 d deg(w), so c1 = 2 + 2 deg(w), gamma1 = 1
MarkovBoundParams markov_params(const Rectangle& h, const WeightFunction& w);

/// psi(d) = 1 - d * A * (c1 d^gamma1)^2 * e^{-sqrt(d)}; may be negative, in
/// which case the max-perturbation bound is vacuous and callers must check
double perturbation_floor(int d, const MarkovBoundParams& p);

}  // namespace loggas
