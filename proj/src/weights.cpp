#include "loggas/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "loggas/rng.hpp"

namespace loggas {

namespace {

double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void sort_terms(std::vector<PolyTerm>& terms) {
  std::sort(terms.begin(), terms.end(), [](const PolyTerm& a, const PolyTerm& b) {
    if (a.n1 + a.n2 != b.n1 + b.n2) return a.n1 + a.n2 < b.n1 + b.n2;
    return a.n1 < b.n1;
  });
}

}  // namespace

std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::unit: return "unit";
    case WeightKind::exp_poly: return "exp_poly";
    case WeightKind::poly: return "poly";
    case WeightKind::tabulated: return "tabulated";
  }
  return "?";
}

WeightKind weight_kind_from_string(const std::string& s) {
  if (s == "unit") return WeightKind::unit;
  if (s == "exp_poly") return WeightKind::exp_poly;
  if (s == "poly") return WeightKind::poly;
  if (s == "tabulated") return WeightKind::tabulated;
  throw std::invalid_argument("unknown weight kind: " + s);
}

WeightFunction WeightFunction::unit(const Rectangle& h) {
  return WeightFunction(WeightKind::unit, h);
}

WeightFunction WeightFunction::exp_poly(const Rectangle& h, std::vector<PolyTerm> q_terms) {
  WeightFunction w(WeightKind::exp_poly, h);
  sort_terms(q_terms);
  w.terms_ = std::move(q_terms);
  for (const auto& t : w.terms_)
    if (t.n1 < 0 || t.n2 < 0) throw std::invalid_argument("weight: negative exponent");
  return w;
}

WeightFunction WeightFunction::poly(const Rectangle& h, std::vector<PolyTerm> w_terms) {
  WeightFunction w(WeightKind::poly, h);
  sort_terms(w_terms);
  w.terms_ = std::move(w_terms);
  for (const auto& t : w.terms_)
    if (t.n1 < 0 || t.n2 < 0) throw std::invalid_argument("weight: negative exponent");
  // positivity on a dense validation grid
  const int nx = 512;
  const int ny = h.degenerate() ? 1 : 512;
  for (int i = 0; i < nx; ++i) {
    const double x = h.x_min + h.width() * i / (nx - 1.0);
    for (int j = 0; j < ny; ++j) {
      const double y = h.degenerate() ? h.y_min : h.y_min + h.height() * j / (ny - 1.0);
      if (w.poly_eval({x, y}) <= 0.0)
        throw std::invalid_argument("poly weight is not > 0 on the domain (fails near (" +
                                    std::to_string(x) + "," + std::to_string(y) + "))");
    }
  }
  return w;
}

WeightFunction WeightFunction::tabulated(const Rectangle& h, int nx, int ny,
                                         std::vector<double> values) {
  if (nx < 2 || ny < 1 || (!h.degenerate() && ny < 2))
    throw std::invalid_argument("tabulated weight: grid too small");
  if (static_cast<std::size_t>(nx) * ny != values.size())
    throw std::invalid_argument("tabulated weight: values size mismatch");
  for (double v : values)
    if (!(v > 0.0)) throw std::invalid_argument("tabulated weight: values must be > 0");
  WeightFunction w(WeightKind::tabulated, h);
  w.nx_ = nx;
  w.ny_ = ny;
  w.values_ = std::move(values);
  return w;
}

double WeightFunction::poly_eval(complexd z) const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.coeff * pow_int(z.real(), t.n1) * pow_int(z.imag(), t.n2);
  return acc;
}

std::array<double, 2> WeightFunction::poly_grad(complexd z) const {
  double gx = 0.0, gy = 0.0;
  for (const auto& t : terms_) {
    if (t.n1 > 0) gx += t.coeff * t.n1 * pow_int(z.real(), t.n1 - 1) * pow_int(z.imag(), t.n2);
    if (t.n2 > 0) gy += t.coeff * t.n2 * pow_int(z.real(), t.n1) * pow_int(z.imag(), t.n2 - 1);
  }
  return {gx, gy};
}

double WeightFunction::interp(complexd z) const {
  const double fx = (z.real() - domain_.x_min) / domain_.width() * (nx_ - 1);
  const int i0 = std::clamp(static_cast<int>(fx), 0, nx_ - 2);
  const double tx = std::clamp(fx - i0, 0.0, 1.0);
  if (ny_ == 1) {
    return values_[i0] * (1 - tx) + values_[i0 + 1] * tx;
  }
  const double fy = (z.imag() - domain_.y_min) / domain_.height() * (ny_ - 1);
  const int j0 = std::clamp(static_cast<int>(fy), 0, ny_ - 2);
  const double ty = std::clamp(fy - j0, 0.0, 1.0);
  auto at = [&](int i, int j) { return values_[static_cast<std::size_t>(j) * nx_ + i]; };
  return at(i0, j0) * (1 - tx) * (1 - ty) + at(i0 + 1, j0) * tx * (1 - ty) +
         at(i0, j0 + 1) * (1 - tx) * ty + at(i0 + 1, j0 + 1) * tx * ty;
}

double WeightFunction::value(complexd z) const {
  switch (kind_) {
    case WeightKind::unit: return 1.0;
    case WeightKind::exp_poly: return std::exp(-poly_eval(z));
    case WeightKind::poly: return poly_eval(z);
    case WeightKind::tabulated: return interp(z);
  }
  return 1.0;
}

double WeightFunction::log_value(complexd z) const {
  switch (kind_) {
    case WeightKind::unit: return 0.0;
    case WeightKind::exp_poly: return -poly_eval(z);
    case WeightKind::poly: return std::log(poly_eval(z));
    case WeightKind::tabulated: return std::log(interp(z));
  }
  return 0.0;
}

std::array<double, 2> WeightFunction::grad_log(complexd z) const {
  switch (kind_) {
    case WeightKind::unit: return {0.0, 0.0};
    case WeightKind::exp_poly: {
      auto g = poly_grad(z);
      return {-g[0], -g[1]};
    }
    case WeightKind::poly: {
      auto g = poly_grad(z);
      const double v = poly_eval(z);
      return {g[0] / v, g[1] / v};
    }
    case WeightKind::tabulated:
      throw std::invalid_argument("tabulated weight has no gradient");
  }
  return {0.0, 0.0};
}

int WeightFunction::per_variable_degree() const {
  if (kind_ == WeightKind::unit) return 0;
  if (kind_ == WeightKind::tabulated)
    throw std::logic_error("tabulated weight has no polynomial degree");
  int deg = 0;
  for (const auto& t : terms_) deg = std::max({deg, t.n1, t.n2});
  return deg;
}

nlohmann::json WeightFunction::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  if (kind_ == WeightKind::exp_poly || kind_ == WeightKind::poly) {
    auto& arr = j["coefficients"] = nlohmann::json::array();
    for (const auto& t : terms_) arr.push_back({t.n1, t.n2, t.coeff});
  } else if (kind_ == WeightKind::tabulated) {
    j["nx"] = nx_;
    j["ny"] = ny_;
    j["values"] = values_;
  }
  return j;
}

WeightFunction WeightFunction::from_json(const nlohmann::json& j, const Rectangle& h) {
  const auto kind = weight_kind_from_string(j.at("kind").get<std::string>());
  if (kind == WeightKind::unit) return unit(h);
  if (kind == WeightKind::tabulated)
    return tabulated(h, j.at("nx").get<int>(), j.at("ny").get<int>(),
                     j.at("values").get<std::vector<double>>());
  std::vector<PolyTerm> terms;
  for (const auto& e : j.at("coefficients"))
    terms.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
  return kind == WeightKind::exp_poly ? exp_poly(h, std::move(terms))
                                      : poly(h, std::move(terms));
}

std::uint64_t WeightFunction::content_hash() const {
  return fnv1a64(to_json().dump());
}

}  // namespace loggas
