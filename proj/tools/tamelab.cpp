#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <omp.h>

#include "CLI11.hpp"
#include "tamelab/config.hpp"
#include "tamelab/errors.hpp"
#include "tamelab/scenarios.hpp"

using namespace tamelab;

namespace {

void print_result(const ScenarioResult& r) {
  std::cout << "scenario " << r.spec.name << (r.spec.variant.empty() ? "" : " (" + r.spec.variant + ")") << "\n";
  for (const auto& c : r.checks) {
    std::cout << "  " << std::left << std::setw(38) << c.tag << std::setw(12) << to_string(c.report.verdict)
              << " worst " << std::setw(14) << c.report.worst_margin << " tol " << c.report.tolerance << "\n";
  }
  std::cout << (r.passed() ? "PASS" : "FAIL") << "  (" << std::fixed << std::setprecision(1) << r.elapsed << " s)\n"
            << std::defaultfloat;
}

std::vector<double> parse_times(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

int finish(ScenarioResult& r, const std::string& out_dir) {
  write_bundle(r, out_dir);
  print_result(r);
  std::cout << "wrote " << out_dir << "\n";
  return exit_code(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tamelab: numerical checks for tamed Dirichlet spaces on grids"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list built-in scenarios");

  auto* run = app.add_subcommand("run", "run a built-in scenario");
  std::string scenario, config, out_dir, variant;
  int resolution = 0, ref_resolution = 32, jobs = 0, truncation = -1;
  std::uint64_t seed = 0;
  bool dump = false;
  run->add_option("scenario", scenario, "scenario name")->required();
  run->add_option("--config", config, "config file (key = value, [tables])")->check(CLI::ExistingFile);
  run->add_option("--resolution", resolution, "base resolution R (refinement pairs use R and 2R)");
  run->add_option("--seed", seed, "random seed");
  run->add_option("--jobs", jobs, "threads for the check kernels");
  run->add_option("--variant", variant, "scenario variant");
  run->add_option("--truncation", truncation, "truncation index");
  run->add_flag("--dump-margins", dump, "write nodewise margins and domain images");
  run->add_option("--out", out_dir, "output directory (default out/<scenario>)");

  std::string geometry = "torus", kappa_file, ell_file, times = "0.05,0.2,1";
  int order = 2, n_random = 10;
  double dimension = INFINITY, kappa_const = 0;
  auto* vge = app.add_subcommand("verify-ge", "gradient estimate on a reference geometry");
  vge->add_option("--geometry", geometry, "two-point|interval|interval-dirichlet|torus|box|halfplane");
  vge->add_option("--resolution", ref_resolution, "cells per side")->capture_default_str();
  vge->add_option("--order", order, "1 or 2")->check(CLI::IsMember({1, 2}));
  vge->add_option("--dimension", dimension, "dimension parameter N (default infinity)");
  vge->add_option("--kappa-const", kappa_const, "constant bulk density k");
  vge->add_option("--kappa-file", kappa_file, "CSV node,k bulk density")->check(CLI::ExistingFile);
  vge->add_option("--boundary-file", ell_file, "CSV node,l boundary density")->check(CLI::ExistingFile);
  vge->add_option("--t", times, "comma separated times");
  vge->add_option("--n-random", n_random, "random test functions");
  vge->add_option("--seed", seed, "random seed");
  vge->add_option("--jobs", jobs, "threads");
  vge->add_flag("--dump-margins", dump, "write nodewise margins");
  vge->add_option("--out", out_dir, "output directory")->default_val("out/verify-ge");

  std::string potential_file;
  double osc_k = -1;
  auto* kscan = app.add_subcommand("kato-scan", "Kato profile rho(t) and Khasminskii bounds for a potential");
  kscan->add_option("--geometry", geometry, "reference geometry")->default_val("box");
  kscan->add_option("--resolution", ref_resolution, "cells per side")->capture_default_str();
  kscan->add_option("--potential-file", potential_file, "CSV node,V")->check(CLI::ExistingFile);
  kscan->add_option("--oscillating", osc_k, "use k times the oscillating potential shape (2D geometries)");
  kscan->add_option("--t", times, "comma separated increasing times")->default_val("0.001,0.005,0.01,0.05,0.1");
  kscan->add_option("--out", out_dir, "output directory")->default_val("out/kato-scan");

  std::string dgeom = "interval";
  double dt = 0.3;
  auto* dcheck = app.add_subcommand("doubling-check", "glued semigroup identity and sub-taming");
  dcheck->add_option("--geometry", dgeom, "interval|disk")->check(CLI::IsMember({"interval", "disk"}));
  dcheck->add_option("--resolution", resolution, "base resolution");
  dcheck->add_option("--t", dt, "identity time");
  dcheck->add_option("--seed", seed, "random seed");
  dcheck->add_option("--out", out_dir, "output directory")->default_val("out/doubling-check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& n : list_scenarios()) std::cout << std::left << std::setw(26) << n << describe_scenario(n) << "\n";
      return 0;
    }
    if (run->parsed()) {
      ScenarioSpec spec = default_spec(scenario);
      if (!config.empty()) apply_config(spec, parse_config_file(config));
      if (resolution > 0) {
        if (spec.resolutions.size() >= 2)
          spec.resolutions = {resolution, 2 * resolution};
        else
          spec.resolutions = {resolution};
      }
      if (run->count("--seed")) spec.seed = seed;
      if (jobs > 0) spec.jobs = jobs;
      if (!variant.empty()) spec.variant = variant;
      if (truncation >= 0) spec.truncation = truncation;
      if (dump) spec.dump_margins = true;
      if (!out_dir.empty()) spec.out_dir = out_dir;
      if (spec.out_dir.empty()) spec.out_dir = "out/" + scenario;
      ScenarioResult r = run_scenario(spec);
      return finish(r, spec.out_dir);
    }
    if (vge->parsed()) {
      if (jobs > 0) omp_set_num_threads(jobs);
      auto ctx = std::make_shared<const GeneratorContext>(reference_context(geometry, ref_resolution));
      TamingMeasure kappa = constant_measure(*ctx, kappa_const);
      if (!kappa_file.empty()) kappa.k = read_node_table(kappa_file, ctx->n());
      if (!ell_file.empty()) kappa.ell = read_node_table(ell_file, ctx->n());
      kappa.id = "cli";
      ScenarioResult r;
      r.spec.name = "verify-ge";
      r.spec.resolutions = {ref_resolution};
      r.spec.t_list = parse_times(times);
      r.spec.seed = vge->count("--seed") ? seed : 1;
      r.spec.dump_margins = dump;
      r.spec.params = {{"geometry", geometry}, {"order", order}, {"kappa_const", kappa_const}};
      const auto fs = test_battery(*ctx, n_random, r.spec.seed);
      r.checks.push_back({check_ge(*ctx, kappa, dimension, order, fs, r.spec.t_list), ctx,
                          "ge" + std::to_string(order) + "_" + geometry});
      return finish(r, out_dir);
    }
    if (kscan->parsed()) {
      auto ctx = std::make_shared<const GeneratorContext>(reference_context(geometry, ref_resolution));
      Vec V;
      if (!potential_file.empty())
        V = read_node_table(potential_file, ctx->n());
      else if (osc_k >= 0)
        V = osc_k * oscillating_shape(*ctx, 1.0, 1.0 / (3 * M_PI), 1);
      else
        throw ConfigParse("kato-scan needs --potential-file or --oscillating");
      const auto mu = bulk_measure(*ctx, V, "scan");
      const auto rows = kato_profile(*ctx, mu, parse_times(times));
      ScenarioResult r;
      r.spec.name = "kato-scan";
      r.spec.resolutions = {ref_resolution};
      r.spec.t_list = parse_times(times);
      r.spec.params = {{"geometry", geometry}};
      auto& tab = r.tables["kato"];
      tab.first = {"t", "rho", "alpha", "potential_sup", "khasminskii_bound"};
      nlohmann::json jrows = nlohmann::json::array();
      for (const auto& row : rows) {
        const double kb = row.rho < 1 ? khasminskii_bound(row.rho) : INFINITY;
        tab.second.push_back({row.t, row.rho, row.alpha, row.potential_sup, kb});
        jrows.push_back({{"t", row.t}, {"rho", row.rho}, {"khasminskii_bound", row.rho < 1 ? nlohmann::json(kb) : nlohmann::json("inf")}});
      }
      r.extra["profile"] = jrows;
      write_bundle(r, out_dir);
      for (const auto& row : tab.second)
        std::cout << "t=" << row[0] << "  rho=" << row[1] << "  1/(1-rho)=" << row[4] << "\n";
      std::cout << "wrote " << out_dir << "\n";
      return 0;
    }
    if (dcheck->parsed()) {
      ScenarioSpec spec = default_spec(dgeom == "disk" ? "doubled-disk" : "doubled-interval");
      if (resolution > 0) spec.resolutions = {resolution};
      spec.params["identity_t"] = dt;
      if (dcheck->count("--seed")) spec.seed = seed;
      ScenarioResult r = run_scenario(spec);
      return finish(r, out_dir);
    }
  } catch (const UnknownScenario& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ConfigParse& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
