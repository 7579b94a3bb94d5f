#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>

namespace loggas {

using complexd = std::complex<double>;

/// Axis-aligned closed rectangle in the plane, identified with a compact
/// subset of C.  A degenerate height (y_min == y_max) models a real interval.
struct Rectangle {
  double x_min, x_max, y_min, y_max;

  Rectangle(double x0, double x1, double y0, double y1)
      : x_min(x0), x_max(x1), y_min(y0), y_max(y1) {
    if (!(x_min < x_max))
      throw std::invalid_argument("Rectangle: x_min must be < x_max");
    if (!(y_min <= y_max))
      throw std::invalid_argument("Rectangle: y_min must be <= y_max");
  }

  /// Interval [a,b] on the real axis.
  static Rectangle interval(double a, double b) { return Rectangle(a, b, 0.0, 0.0); }

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool degenerate() const { return y_min == y_max; }

  // closed-set membership, boundary included
  bool contains(complexd z, double tol = 0.0) const {
    return z.real() >= x_min - tol && z.real() <= x_max + tol &&
           z.imag() >= y_min - tol && z.imag() <= y_max + tol;
  }

  complexd clamp(complexd z) const {
    return {std::clamp(z.real(), x_min, x_max), std::clamp(z.imag(), y_min, y_max)};
  }

  /// Lebesgue mass: area, or length for a degenerate rectangle.
  double lebesgue_mass() const { return degenerate() ? width() : width() * height(); }

  double min_side() const {
    return degenerate() ? width() : std::min(width(), height());
  }

  bool operator==(const Rectangle&) const = default;
};

}  // namespace loggas
