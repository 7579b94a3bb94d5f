#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "loggas/geometry.hpp"

namespace loggas {

enum class WeightKind { unit, exp_poly, poly, tabulated };

std::string to_string(WeightKind k);
WeightKind weight_kind_from_string(const std::string& s);

struct PolyTerm {
  int n1, n2;
  double coeff;
};

/// Positive continuous weight w on a rectangle, with Q = -log w.
///   unit       w = 1
///   exp_poly   w = exp(-Q), Q a real polynomial (the stored coefficients)
///   poly       w itself is a real polynomial, validated > 0 on the domain
///   tabulated  bilinear interpolation of sampled values (> 0)
/// Tabulated weights have no gradient and are excluded from polynomial-degree
/// bookkeeping.
class WeightFunction {
 public:
  static WeightFunction unit(const Rectangle& h);
  static WeightFunction exp_poly(const Rectangle& h, std::vector<PolyTerm> q_terms);
  static WeightFunction poly(const Rectangle& h, std::vector<PolyTerm> w_terms);
  static WeightFunction tabulated(const Rectangle& h, int nx, int ny,
                                  std::vector<double> values);

  double value(complexd z) const;
  double log_value(complexd z) const;  // = -Q(z)
  /// gradient of log w; throws for tabulated weights
  std::array<double, 2> grad_log(complexd z) const;
  bool differentiable() const { return kind_ != WeightKind::tabulated; }

  WeightKind kind() const { return kind_; }
  const Rectangle& domain() const { return domain_; }

  /// largest per-real-variable degree of w as a polynomial (0 for unit,
  /// throws for non-polynomial kinds)
  int per_variable_degree() const;
  bool is_polynomial() const { return kind_ == WeightKind::unit || kind_ == WeightKind::poly; }

  nlohmann::json to_json() const;
  static WeightFunction from_json(const nlohmann::json& j, const Rectangle& h);

  /// stable content hash (kind + payload), used for cache keys
  std::uint64_t content_hash() const;

 private:
  WeightFunction(WeightKind k, Rectangle h) : kind_(k), domain_(h) {}

  double poly_eval(complexd z) const;
  std::array<double, 2> poly_grad(complexd z) const;
  double interp(complexd z) const;

  WeightKind kind_;
  Rectangle domain_;
  std::vector<PolyTerm> terms_;  // Q for exp_poly, w for poly
  int nx_ = 0, ny_ = 0;
  std::vector<double> values_;
};

}  // namespace loggas
