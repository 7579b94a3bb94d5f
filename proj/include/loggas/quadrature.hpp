#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace loggas {

/// Gauss-Legendre nodes and weights on [-1,1] (Newton on the Legendre
/// recurrence; cached per n)
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

/// integral of f over [a,b] with n-point Gauss-Legendre
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace loggas
