#pragma once

#include <functional>
#include <vector>

#include "loggas/geometry.hpp"
#include "loggas/measures.hpp"

namespace loggas {

/// CDF of the arcsine distribution on [-1,1] (equilibrium measure of the
/// unweighted interval)
double arcsine_cdf(double x);

/// CDF of the semicircle law on [-b, b] (equilibrium density for the external
/// field x^2/b^2 on the line, support radius b)
double semicircle_cdf(double x, double b = 1.0);

/// N-cell midpoint discretization of the arcsine measure on [-1,1], with cell
/// self-energy attached (discretization mode)
GridMeasure arcsine_measure(int n);

/// pushforward of the discretized arcsine under z -> s z
GridMeasure scaled_arcsine_measure(int n, double s);

/// d Chebyshev-Lobatto points on [a,b]
std::vector<double> chebyshev_lobatto(int d, double a = -1.0, double b = 1.0);

/// d starting points in H for Fekete-type optimizers: Chebyshev-Lobatto
/// tensor nodes subsampled to d
std::vector<complexd> lobatto_start(const Rectangle& h, int d);

}  // namespace loggas
