#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loggas/equilibrium.hpp"
#include "loggas/fekete.hpp"
#include "loggas/montecarlo.hpp"

namespace loggas::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  nlohmann::json details;
};

/// scales iteration budgets; values well below 1 force non-convergence paths
struct Budget {
  double scale = 1.0;
};

struct Options {
  std::uint64_t seed = 7;
  Budget budget;
};

/// Lazily computed artifacts shared between criteria (diameter sweeps,
/// equilibria, reference measures).
class Context {
 public:
  explicit Context(const Options& opts);
  ~Context();

  const Options& options() const { return opts_; }
  FeketeOptions fekete_opts() const;
  EqOptions eq_opts() const;
  ChainOptions chain_opts() const;

  const DiameterTable& diameter(bool gaussian);
  const GridMeasure& equilibrium(bool gaussian);  // N = 512 on [-1,1]
  const GridMeasure& arcsine_ref();               // 512-cell discretization
  bool equilibrium_converged(bool gaussian);

 private:
  Options opts_;
  struct State;
  std::unique_ptr<State> state_;
};

CheckResult run_criterion(int id, Context& ctx);

struct Report {
  std::string suite;
  std::uint64_t seed = 0;
  double budget_scale = 1.0;
  std::vector<CheckResult> checks;
  bool all_passed = false;

  nlohmann::json to_json() const;
};

std::vector<std::string> suite_names();
std::vector<int> suite_criteria(const std::string& suite);
Report run_suite(const std::string& suite, const Options& opts);

}  // namespace loggas::verify
