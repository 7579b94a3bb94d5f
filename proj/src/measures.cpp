#include "loggas/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace loggas {

namespace {

double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool Configuration::in(const Rectangle& h, double tol) const {
  for (auto z : points)
    if (!h.contains(z, tol)) return false;
  return true;
}

Configuration Configuration::canonical() const {
  Configuration c = *this;
  std::sort(c.points.begin(), c.points.end(), [](complexd a, complexd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return c;
}

GridMeasure::GridMeasure(std::vector<complexd> nodes, std::vector<double> masses,
                         std::string label)
    : nodes_(std::move(nodes)), masses_(std::move(masses)), label_(std::move(label)) {
  if (nodes_.size() != masses_.size())
    throw std::invalid_argument("GridMeasure: nodes/masses size mismatch");
  if (nodes_.empty()) throw std::invalid_argument("GridMeasure: empty measure");
  double total = 0.0;
  for (double m : masses_) {
    if (m < 0.0) throw std::invalid_argument("GridMeasure: negative mass");
    total += m;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("GridMeasure: masses sum to " + fmt_double(total) +
                                ", not 1 within 1e-12");
  auto sorted = nodes_;
  std::sort(sorted.begin(), sorted.end(), [](complexd a, complexd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i] == sorted[i + 1])
      throw std::invalid_argument("GridMeasure: nodes must be pairwise distinct");
}

const std::vector<double>& GridMeasure::cell_self_energy() const {
  if (!cell_self_energy_)
    throw std::logic_error("GridMeasure: no cell data (not a discretization)");
  return *cell_self_energy_;
}

void GridMeasure::set_cell_self_energy(std::vector<double> v) {
  if (v.size() != nodes_.size())
    throw std::invalid_argument("GridMeasure: cell data size mismatch");
  cell_self_energy_ = std::move(v);
}

nlohmann::json GridMeasure::to_json() const {
  nlohmann::json j;
  j["label"] = label_;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (auto z : nodes_) nodes.push_back({z.real(), z.imag()});
  j["masses"] = masses_;
  if (cell_self_energy_) j["cell_self_energy"] = *cell_self_energy_;
  if (!converged_) j["converged"] = false;
  return j;
}

GridMeasure GridMeasure::from_json(const nlohmann::json& j) {
  std::vector<complexd> nodes;
  for (const auto& p : j.at("nodes")) nodes.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  GridMeasure m(std::move(nodes), j.at("masses").get<std::vector<double>>(),
                j.value("label", std::string{}));
  if (j.contains("cell_self_energy"))
    m.set_cell_self_energy(j["cell_self_energy"].get<std::vector<double>>());
  if (j.contains("converged")) m.set_converged(j["converged"].get<bool>());
  return m;
}

void GridMeasure::write_csv(std::ostream& os) const {
  os << "x,y,mass\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    os << fmt_double(nodes_[i].real()) << ',' << fmt_double(nodes_[i].imag()) << ','
       << fmt_double(masses_[i]) << '\n';
}

void GridMeasure::write_csv_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_csv(os);
}

GridMeasure GridMeasure::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
  std::vector<complexd> nodes;
  std::vector<double> masses;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double x, y, m;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &m) != 3)
      throw std::runtime_error("bad CSV row: " + line);
    nodes.emplace_back(x, y);
    masses.push_back(m);
  }
  return GridMeasure(std::move(nodes), std::move(masses));
}

GridMeasure GridMeasure::read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is);
}

GridMeasure empirical(const Configuration& lambda) {
  if (lambda.points.empty()) throw std::invalid_argument("empirical: empty configuration");
  // merge exactly coincident points; first-appearance order
  std::vector<complexd> nodes;
  std::vector<double> masses;
  const double w = 1.0 / lambda.d();
  for (auto z : lambda.points) {
    bool merged = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i] == z) {
        masses[i] += w;
        merged = true;
        break;
      }
    }
    if (!merged) {
      nodes.push_back(z);
      masses.push_back(w);
    }
  }
  double total = 0.0;
  for (double m : masses) total += m;
  for (double& m : masses) m /= total;  // remove accumulated rounding
  return GridMeasure(std::move(nodes), std::move(masses), "empirical");
}

std::vector<std::pair<int, int>> moment_indices(int k) {
  std::vector<std::pair<int, int>> idx;
  for (int total = 0; total <= k; ++total)
    for (int n1 = 0; n1 <= total; ++n1) idx.emplace_back(n1, total - n1);
  return idx;
}

double MomentTable::at(int n1, int n2) const {
  for (const auto& e : entries)
    if (e.n1 == n1 && e.n2 == n2) return e.value;
  throw std::out_of_range("MomentTable: no entry (" + std::to_string(n1) + "," +
                          std::to_string(n2) + ")");
}

nlohmann::json MomentTable::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) arr.push_back({e.n1, e.n2, e.value});
  return arr;
}

MomentTable MomentTable::from_json(const nlohmann::json& j, int k) {
  MomentTable t;
  t.max_degree = k;
  for (const auto& e : j)
    t.entries.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
  return t;
}

MomentTable moments(const GridMeasure& m, int k) {
  if (k < 0) throw std::invalid_argument("moments: k must be >= 0");
  MomentTable t;
  t.max_degree = k;
  const auto& nodes = m.nodes();
  const auto& masses = m.masses();
  for (auto [n1, n2] : moment_indices(k)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += masses[i] * pow_int(nodes[i].real(), n1) * pow_int(nodes[i].imag(), n2);
    t.entries.push_back({n1, n2, acc});
  }
  return t;
}

MomentNeighborhood::MomentNeighborhood(MomentTable ref, int k_, double eps)
    : reference(std::move(ref)), k(k_), epsilon(eps) {
  if (epsilon <= 0.0) throw std::invalid_argument("MomentNeighborhood: epsilon must be > 0");
  const auto idx = moment_indices(k);
  if (reference.entries.size() != idx.size())
    throw std::invalid_argument("MomentNeighborhood: reference must contain exactly the "
                                "moments of total degree <= k");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& e = reference.entries[i];
    if (e.n1 != idx[i].first || e.n2 != idx[i].second)
      throw std::invalid_argument("MomentNeighborhood: reference moments out of order");
  }
  if (std::fabs(reference.at(0, 0) - 1.0) > 1e-9)
    throw std::invalid_argument("MomentNeighborhood: (0,0) moment must equal 1");
}

MomentNeighborhood MomentNeighborhood::around(const GridMeasure& m, int k, double eps) {
  return MomentNeighborhood(moments(m, k), k, eps);
}

nlohmann::json MomentNeighborhood::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["epsilon"] = epsilon;
  j["moments"] = reference.to_json();
  return j;
}

MomentNeighborhood MomentNeighborhood::from_json(const nlohmann::json& j) {
  const int k = j.at("k").get<int>();
  return MomentNeighborhood(MomentTable::from_json(j.at("moments"), k), k,
                            j.at("epsilon").get<double>());
}

MomentGap max_moment_gap(const MomentTable& got, const MomentNeighborhood& nb) {
  MomentGap worst{-1.0, 0, 0};
  for (std::size_t i = 0; i < got.entries.size(); ++i) {
    const auto& e = got.entries[i];
    const double gap = std::fabs(e.value - nb.reference.entries[i].value);
    if (gap > worst.gap) worst = {gap, e.n1, e.n2};
  }
  return worst;
}

MomentGap max_moment_gap(const GridMeasure& m, const MomentNeighborhood& nb) {
  return max_moment_gap(moments(m, nb.k), nb);
}

bool in_neighborhood(const GridMeasure& m, const MomentNeighborhood& nb) {
  return max_moment_gap(m, nb).gap < nb.epsilon;
}

PerturbationBox PerturbationBox::of(const Configuration& lambda) {
  if (lambda.d() < 1) throw std::invalid_argument("PerturbationBox: empty configuration");
  return {lambda, std::exp(-std::sqrt(static_cast<double>(lambda.d())))};
}

bool PerturbationBox::contains(const Configuration& other) const {
  if (other.d() != center.d()) return false;
  for (int j = 0; j < center.d(); ++j)
    if (std::abs(other.points[j] - center.points[j]) > radius) return false;
  return true;
}

Configuration PerturbationBox::sample(const Rectangle& h, Rng& rng) const {
  Configuration out;
  out.points.reserve(center.points.size());
  for (auto c : center.points) {
    const double x_lo = std::max(h.x_min, c.real() - radius);
    const double x_hi = std::min(h.x_max, c.real() + radius);
    if (h.degenerate()) {
      out.points.emplace_back(rng.uniform(x_lo, x_hi), h.y_min);
      continue;
    }
    const double y_lo = std::max(h.y_min, c.imag() - radius);
    const double y_hi = std::min(h.y_max, c.imag() + radius);
    // rejection from the clipped bounding box into the disc
    for (;;) {
      const complexd z(rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi));
      if (std::abs(z - c) <= radius) {
        out.points.push_back(z);
        break;
      }
    }
  }
  return out;
}

}  // namespace loggas
