#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loggas/geometry.hpp"
#include "loggas/rng.hpp"

namespace loggas {

/// An ordered tuple of d points, the argument of the Vandermonde machinery.
struct Configuration {
  std::vector<complexd> points;

  Configuration() = default;
  explicit Configuration(std::vector<complexd> pts) : points(std::move(pts)) {}

  int d() const { return static_cast<int>(points.size()); }
  bool in(const Rectangle& h, double tol = 0.0) const;

  /// sorted by (Re, Im); the canonical representative of the orbit under
  /// coordinate permutations
  Configuration canonical() const;
};

/// Discrete probability measure: distinct nodes with nonnegative masses
/// summing to one.  Grid builders attach per-node cell self-energy values
/// (mean of log|z-t| over the node's cell pair), which marks the measure as a
/// discretization of a continuous measure rather than a genuinely atomic one.
class GridMeasure {
 public:
  GridMeasure(std::vector<complexd> nodes, std::vector<double> masses,
              std::string label = "");

  const std::vector<complexd>& nodes() const { return nodes_; }
  const std::vector<double>& masses() const { return masses_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return nodes_.size(); }

  bool is_discretization() const { return cell_self_energy_.has_value(); }
  const std::vector<double>& cell_self_energy() const;

  /// attach cell data; flips the measure into discretization mode
  void set_cell_self_energy(std::vector<double> v);

  bool converged() const { return converged_; }
  void set_converged(bool c) { converged_ = c; }

  nlohmann::json to_json() const;
  static GridMeasure from_json(const nlohmann::json& j);

  void write_csv(std::ostream& os) const;
  void write_csv_file(const std::string& path) const;
  static GridMeasure read_csv(std::istream& is);
  static GridMeasure read_csv_file(const std::string& path);

 private:
  std::vector<complexd> nodes_;
  std::vector<double> masses_;
  std::string label_;
  std::optional<std::vector<double>> cell_self_energy_;
  bool converged_ = true;
};

/// kappa_d: uniform atomic measure on the configuration points; exactly
/// coincident points are merged with accumulated mass
GridMeasure empirical(const Configuration& lambda);

/// Real moments m(n1,n2) = int x^n1 y^n2 dm for n1+n2 <= k, stored in total
/// degree order (n1+n2, then n1) so serialization is reproducible.
struct MomentTable {
  struct Entry {
    int n1, n2;
    double value;
  };
  std::vector<Entry> entries;
  int max_degree = 0;

  double at(int n1, int n2) const;
  nlohmann::json to_json() const;
  static MomentTable from_json(const nlohmann::json& j, int k);
};

MomentTable moments(const GridMeasure& m, int k);

/// enumerate (n1, n2) with n1+n2 <= k in the canonical order
std::vector<std::pair<int, int>> moment_indices(int k);

/// The moment window G(mu, k, epsilon): all measures whose moments up to
/// total degree k lie strictly within epsilon of the reference moments.
struct MomentNeighborhood {
  MomentTable reference;
  int k;
  double epsilon;

  MomentNeighborhood(MomentTable ref, int k_, double eps);
  static MomentNeighborhood around(const GridMeasure& m, int k, double eps);

  nlohmann::json to_json() const;
  static MomentNeighborhood from_json(const nlohmann::json& j);
};

/// largest |moment(m) - reference| over the window's index set, with the
/// attaining index
struct MomentGap {
  double gap;
  int n1, n2;
};
MomentGap max_moment_gap(const MomentTable& got, const MomentNeighborhood& nb);
MomentGap max_moment_gap(const GridMeasure& m, const MomentNeighborhood& nb);

/// strict membership per the window definition
bool in_neighborhood(const GridMeasure& m, const MomentNeighborhood& nb);

/// The coordinate-wise perturbation box around a configuration: each point
/// may move by at most e^{-sqrt(d)}.
struct PerturbationBox {
  Configuration center;
  double radius;

  static PerturbationBox of(const Configuration& lambda);
  bool contains(const Configuration& other) const;
  /// uniform sample from the box intersected with H^d
  Configuration sample(const Rectangle& h, Rng& rng) const;
};

}  // namespace loggas
