// loggas: weighted potential theory on rectangles from the command line.
// Subcommands are thin adapters over the library; all numerics live there.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "loggas/classical.hpp"
#include "loggas/equilibrium.hpp"
#include "loggas/fekete.hpp"
#include "loggas/kernels.hpp"
#include "loggas/measures.hpp"
#include "loggas/montecarlo.hpp"
#include "loggas/verify.hpp"
#include "loggas/version.hpp"

using nlohmann::json;
using namespace loggas;

namespace {

Rectangle parse_rect(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() == 2) return Rectangle::interval(v[0], v[1]);
  if (v.size() == 4) return Rectangle(v[0], v[1], v[2], v[3]);
  throw CLI::ValidationError("--rect", "expected 'a,b' (interval) or 'x0,x1,y0,y1'");
}

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  json j;
  is >> j;
  return j;
}

WeightFunction load_weight(const std::string& arg, const Rectangle& h) {
  if (arg == "unit" || arg.empty()) return WeightFunction::unit(h);
  return WeightFunction::from_json(load_json_file(arg), h);
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

GridMeasure load_measure(const std::string& path) {
  if (ends_with(path, ".json")) return GridMeasure::from_json(load_json_file(path));
  return GridMeasure::read_csv_file(path);
}

// infer the uniform lattice cell geometry of a CSV measure so it can be
// treated as a discretization
void attach_inferred_cells(GridMeasure& m) {
  if (m.is_discretization()) return;
  std::vector<double> xs, ys;
  for (auto z : m.nodes()) {
    xs.push_back(z.real());
    ys.push_back(z.imag());
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  auto spacing = [](const std::vector<double>& v) {
    double best = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      const double d = v[i] - v[i - 1];
      if (d > 1e-14 && (best == 0.0 || d < best)) best = d;
    }
    return best;
  };
  const double hx = spacing(xs);
  const double hy = spacing(ys);
  if (hx == 0.0)
    throw std::runtime_error("cannot infer a lattice from the measure nodes; "
                             "supply a JSON measure with cell data");
  m.set_cell_self_energy(
      std::vector<double>(m.size(), cell_self_energy(hx, hy)));
}

void write_output(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot open " + out);
  os << j.dump(2) << "\n";
}

std::string hash_hex(const json& request) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(request.dump())));
  return buf;
}

json stamp(const json& request) {
  return {{"version", kVersion}, {"config_hash", hash_hex(request)}, {"request", request}};
}

json json_real(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;  // JSON has no infinities
}

BaseMeasure load_tau(const json& spec, const Rectangle& fallback_domain) {
  if (spec.is_null()) return BaseMeasure::lebesgue(fallback_domain);
  const std::string kind = spec.value("kind", "lebesgue");
  Rectangle dom = fallback_domain;
  if (spec.contains("rect")) {
    const auto& r = spec["rect"];
    dom = r.size() == 2 ? Rectangle::interval(r[0], r[1])
                        : Rectangle(r[0], r[1], r[2], r[3]);
  }
  if (kind == "lebesgue") return BaseMeasure::lebesgue(dom);
  if (kind == "density_grid")
    return BaseMeasure::density_grid(dom, spec.at("nx").get<int>(), spec.at("ny").get<int>(),
                                     spec.at("values").get<std::vector<double>>());
  throw std::runtime_error("unknown base measure kind: " + kind);
}

ChainOptions chain_from_json(const json& j) {
  ChainOptions c;
  if (j.is_null()) return c;
  c.beta_points = j.value("beta_points", c.beta_points);
  c.burn_sweeps = j.value("burn_sweeps", c.burn_sweeps);
  c.measure_sweeps = j.value("measure_sweeps", c.measure_sweeps);
  c.thin = j.value("thin", c.thin);
  c.target_acceptance = j.value("target_acceptance", c.target_acceptance);
  c.ladder_iid = j.value("ladder_iid", c.ladder_iid);
  c.ladder_sweeps = j.value("ladder_sweeps", c.ladder_sweeps);
  c.force_mc = j.value("force_mc", c.force_mc);
  c.quad_points = j.value("quad_points", c.quad_points);
  return c;
}

json config_json(const Configuration& c) {
  json arr = json::array();
  for (auto z : c.points) arr.push_back({z.real(), z.imag()});
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loggas: weighted Vandermonde asymptotics, Fekete sets, equilibrium "
               "measures and log-gas sampling on planar rectangles"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0: library default)");

  // ---- fekete ----
  auto* fk = app.add_subcommand("fekete", "maximize the weighted Vandermonde over H^d");
  std::string fk_rect, fk_weight = "unit", fk_out;
  int fk_d = 16, fk_restarts = 4;
  std::uint64_t fk_seed = 7;
  fk->add_option("--rect", fk_rect, "a,b or x0,x1,y0,y1")->required();
  fk->add_option("--weight", fk_weight, "weight JSON file or 'unit'");
  fk->add_option("--d", fk_d, "number of points")->required();
  fk->add_option("--restarts", fk_restarts);
  fk->add_option("--seed", fk_seed);
  fk->add_option("--out", fk_out, "output JSON path (default stdout)");

  // ---- eqmeasure ----
  auto* eqc = app.add_subcommand("eqmeasure", "minimize the weighted energy on a grid");
  std::string eq_rect, eq_weight = "unit", eq_out;
  int eq_grid = 512;
  eqc->add_option("--rect", eq_rect)->required();
  eqc->add_option("--weight", eq_weight);
  eqc->add_option("--grid", eq_grid, "grid size");
  eqc->add_option("--out", eq_out, "output path (.csv or .json)")->required();

  // ---- entropy ----
  auto* en = app.add_subcommand("entropy", "free entropy of a measure");
  std::string en_measure, en_out;
  bool en_disc = false;
  en->add_option("--measure", en_measure, "measure file (.csv or .json)")->required();
  en->add_flag("--discretization", en_disc,
               "treat a plain CSV as a grid discretization (infers cell sizes)");
  en->add_option("--out", en_out);

  // ---- rate ----
  auto* rt = app.add_subcommand("rate", "large-deviation rate of a measure");
  std::string rt_measure, rt_weight = "unit", rt_rect, rt_out;
  int rt_grid = 512;
  bool rt_disc = false;
  rt->add_option("--measure", rt_measure)->required();
  rt->add_option("--weight", rt_weight);
  rt->add_option("--rect", rt_rect)->required();
  rt->add_option("--grid", rt_grid);
  rt->add_flag("--discretization", rt_disc);
  rt->add_option("--out", rt_out);

  // ---- sample ----
  auto* sm = app.add_subcommand("sample", "estimate log Z, log J or log Prob");
  std::string sm_mode, sm_config, sm_out;
  std::optional<std::uint64_t> sm_seed;
  sm->add_option("--mode", sm_mode, "Z | J | prob")->required();
  sm->add_option("--config", sm_config, "run configuration JSON")->required();
  sm->add_option("--seed", sm_seed, "override the config seed");
  sm->add_option("--out", sm_out);

  // ---- bm ----
  auto* bm = app.add_subcommand("bm", "Bernstein-Markov ratio table");
  std::string bm_rect, bm_weight = "unit", bm_klist = "20,30,40,50,60", bm_out, bm_tau_rect;
  int bm_trials = 32;
  std::uint64_t bm_seed = 7;
  bm->add_option("--rect", bm_rect)->required();
  bm->add_option("--weight", bm_weight);
  bm->add_option("--k-list", bm_klist, "comma-separated degrees");
  bm->add_option("--trials", bm_trials);
  bm->add_option("--seed", bm_seed);
  bm->add_option("--tau-rect", bm_tau_rect,
                 "support of the Lebesgue base measure (default: --rect)");
  bm->add_option("--out", bm_out);

  // ---- verify ----
  auto* vf = app.add_subcommand("verify", "run a named check suite");
  std::string vf_suite = "all", vf_out;
  std::uint64_t vf_seed = 7;
  double vf_budget = 1.0;
  vf->add_option("--suite", vf_suite, "all | interval-classical | perturbation-floor | "
                                      "small-d-oracle | sandwich | entropy-trend | rate | "
                                      "bernstein-markov | gradients | determinism | equilibrium");
  vf->add_option("--seed", vf_seed);
  vf->add_option("--budget", vf_budget, "iteration budget scale (tiny values force failure)");
  vf->add_option("--out", vf_out, "report JSON path");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) kernels::set_threads(threads);

  try {
    if (*fk) {
      const auto h = parse_rect(fk_rect);
      const auto w = load_weight(fk_weight, h);
      FeketeOptions opts;
      opts.restarts = fk_restarts;
      const json request = {{"cmd", "fekete"},     {"rect", fk_rect}, {"weight", w.to_json()},
                            {"d", fk_d},           {"restarts", fk_restarts},
                            {"seed", fk_seed}};
      const auto res = solve_fekete(h, w, fk_d, opts, fk_seed);
      json out = stamp(request);
      out["result"] = {{"configuration", config_json(res.configuration)},
                       {"log_wvdm", res.log_wvdm_value},
                       {"delta_d", res.delta_d},
                       {"iterations", res.iterations},
                       {"converged", res.converged}};
      write_output(out, fk_out);
      return 0;
    }

    if (*eqc) {
      const auto h = parse_rect(eq_rect);
      const auto w = load_weight(eq_weight, h);
      EqDiagnostics diag;
      const auto eq = solve_equilibrium(h, w, eq_grid, {}, &diag);
      if (ends_with(eq_out, ".json")) {
        const json request = {{"cmd", "eqmeasure"}, {"rect", eq_rect},
                              {"weight", w.to_json()}, {"grid", eq_grid}};
        json out = stamp(request);
        out["measure"] = eq.to_json();
        out["diagnostics"] = {{"iterations", diag.iterations},
                              {"converged", diag.converged},
                              {"pg_norm", diag.pg_norm},
                              {"kernel_lambda_max", diag.kernel_lambda_max}};
        write_output(out, eq_out);
      } else {
        eq.write_csv_file(eq_out);
        if (!diag.converged) std::fprintf(stderr, "warning: solver did not converge\n");
      }
      return diag.converged ? 0 : 2;
    }

    if (*en) {
      auto m = load_measure(en_measure);
      if (en_disc) attach_inferred_cells(m);
      const double sigma = free_entropy(m);
      const json request = {{"cmd", "entropy"}, {"measure", en_measure},
                            {"discretization", en_disc || m.is_discretization()}};
      json out = stamp(request);
      out["free_entropy"] = json_real(sigma);
      out["finite"] = std::isfinite(sigma);
      write_output(out, en_out);
      return 0;
    }

    if (*rt) {
      const auto h = parse_rect(rt_rect);
      const auto phi = load_weight(rt_weight, h);
      auto m = load_measure(rt_measure);
      if (rt_disc) attach_inferred_cells(m);
      const auto res = rate_functional_detail(m, phi, h, rt_grid);
      const json request = {{"cmd", "rate"},   {"measure", rt_measure}, {"rect", rt_rect},
                            {"weight", phi.to_json()}, {"grid", rt_grid}};
      json out = stamp(request);
      out["rate"] = json_real(res.value);
      out["equilibrium_converged"] = res.equilibrium_converged;
      write_output(out, rt_out);
      return res.equilibrium_converged ? 0 : 2;
    }

    if (*sm) {
      const json cfg = load_json_file(sm_config);
      const auto& r = cfg.at("rect");
      const Rectangle h = r.size() == 2 ? Rectangle::interval(r[0], r[1])
                                        : Rectangle(r[0], r[1], r[2], r[3]);
      const auto w = cfg.contains("weight") && cfg["weight"].is_object()
                         ? WeightFunction::from_json(cfg["weight"], h)
                         : WeightFunction::unit(h);
      const auto tau = load_tau(cfg.value("tau", json()), h);
      const int d = cfg.at("d").get<int>();
      const std::uint64_t seed = sm_seed ? *sm_seed : cfg.value("seed", 7ULL);
      const auto opts = chain_from_json(cfg.value("chain", json()));
      std::optional<MomentNeighborhood> nbhd;
      if (cfg.contains("neighborhood"))
        nbhd = MomentNeighborhood::from_json(cfg["neighborhood"]);
      else if (cfg.contains("neighborhood_file"))
        nbhd = MomentNeighborhood::from_json(load_json_file(cfg["neighborhood_file"]));

      McEstimate est;
      if (sm_mode == "Z") {
        est = log_Z(h, w, tau, d, seed, opts);
      } else if (sm_mode == "J") {
        if (!nbhd) throw std::runtime_error("mode J needs a neighborhood in the config");
        est = log_J(h, w, tau, *nbhd, d, seed, opts);
      } else if (sm_mode == "prob") {
        if (!nbhd) throw std::runtime_error("mode prob needs a neighborhood in the config");
        est = log_prob(h, w, tau, *nbhd, d, seed, opts);
      } else {
        throw std::runtime_error("unknown mode: " + sm_mode + " (want Z, J or prob)");
      }
      json request = {{"cmd", "sample"}, {"mode", sm_mode}, {"config", cfg}, {"seed", seed}};
      json out = stamp(request);
      out["estimate"] = est.to_json();
      write_output(out, sm_out);
      return 0;
    }

    if (*bm) {
      const auto h = parse_rect(bm_rect);
      const auto w = load_weight(bm_weight, h);
      const auto tau =
          BaseMeasure::lebesgue(bm_tau_rect.empty() ? h : parse_rect(bm_tau_rect));
      std::vector<int> ks;
      std::stringstream ss(bm_klist);
      std::string tok;
      while (std::getline(ss, tok, ',')) ks.push_back(std::stoi(tok));
      const auto rows = bm_ratio(h, w, tau, ks, bm_trials, bm_seed);
      const json request = {{"cmd", "bm"},       {"rect", bm_rect},   {"weight", w.to_json()},
                            {"k_list", ks},      {"trials", bm_trials}, {"seed", bm_seed},
                            {"tau_rect", bm_tau_rect}};
      json out = stamp(request);
      json table = json::array();
      for (const auto& row : rows) table.push_back({row.k, row.max_ratio, row.ratio_root});
      out["rows"] = table;
      write_output(out, bm_out);
      return 0;
    }

    if (*vf) {
      verify::Options opts;
      opts.seed = vf_seed;
      opts.budget.scale = vf_budget;
      const auto rep = verify::run_suite(vf_suite, opts);
      write_output(rep.to_json(), vf_out);
      for (const auto& c : rep.checks)
        std::fprintf(stderr, "[%2d] %-22s %s\n", c.id, c.name.c_str(),
                     c.passed ? "PASS" : "FAIL");
      return rep.all_passed ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
