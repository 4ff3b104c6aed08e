// Command-line driver: forward spectra, traces, inversions, parameter sweeps
// and the reference example presets.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spectrace/experiments.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string example;
  std::string spectrum;
  std::string target;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> k, m, j, n, k1, max_iter;
  std::optional<double> delta, tol;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON experiment config");
  sub->add_option("--example", o.example, "ex1..ex5 or custom");
  sub->add_option("--seed", o.seed, "noise RNG seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--k", o.k, "measured eigenvalue pairs K");
  sub->add_option("--m", o.m, "cosine modes M");
  sub->add_option("--j", o.j, "modal matrix size J");
  sub->add_option("--n", o.n, "number of polynomials N");
  sub->add_option("--k1", o.k1, "pairs used in trace sums K1");
  sub->add_option("--delta", o.delta, "noise level");
  sub->add_option("--tol", o.tol, "Gauss-Newton residual tolerance");
  sub->add_option("--max-iter", o.max_iter, "Gauss-Newton iteration cap");
  sub->add_option("--spectrum", o.spectrum, "read measured spectrum CSV instead of solving");
  sub->add_option("--target", o.target, "spectrum | inverse_crime");
}

spectrace::ExperimentConfig resolve(const Overrides& o) {
  spectrace::ExperimentConfig c =
      o.config.empty() ? spectrace::ExperimentConfig{} : spectrace::load_experiment_config(o.config);
  if (!o.example.empty()) c.example = spectrace::example_from_string(o.example);
  if (o.seed) c.noise.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  if (o.k) c.gn.k_meas = *o.k;
  if (o.m) c.gn.m_modes = *o.m;
  if (o.j) c.gn.j_trunc = *o.j;
  if (o.n) c.gn.n_polys = *o.n;
  if (o.k1) c.gn.k_tail = *o.k1;
  if (o.delta) c.noise.delta = *o.delta;
  if (o.tol) c.gn.tol = *o.tol;
  if (o.max_iter) c.gn.max_iter = *o.max_iter;
  if (!o.spectrum.empty()) c.spectrum_file = o.spectrum;
  if (o.target == "inverse_crime") c.target = spectrace::TargetMode::inverse_crime;
  else if (o.target == "spectrum") c.target = spectrace::TargetMode::spectrum;
  else if (!o.target.empty()) throw CLI::ValidationError("--target", "expected spectrum or inverse_crime");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrace: damping recovery from damped-wave spectra via trace formulas"};
  app.require_subcommand(1);

  Overrides o;
  std::string kind = "stabilized";
  std::string repro_example;

  auto* forward = app.add_subcommand("forward", "solve the forward problem and write spectrum CSV");
  auto* traces = app.add_subcommand("traces", "compute trace sums from a measured spectrum");
  auto* invert = app.add_subcommand("invert", "recover cosine coefficients by Gauss-Newton");
  auto* table = app.add_subcommand("table", "sweep (M, K1=J=N) and write an error table");
  auto* repro = app.add_subcommand("reproduce", "run the presets of a reference example");
  for (auto* s : {forward, traces, invert, table, repro}) add_common(s, o);
  traces->add_option("--kind", kind, "stabilized | raw_power");
  repro->add_option("id", repro_example, "ex1..ex5")->required();

  std::vector<int> sweep_m, sweep_size;
  table->add_option("--sweep-m", sweep_m, "list of M values");
  table->add_option("--sweep-size", sweep_size, "list of K1=J=N values");

  CLI11_PARSE(app, argc, argv);

  try {
    spectrace::ExperimentConfig cfg = resolve(o);
    std::cout << std::setprecision(6);
    if (forward->parsed()) {
      const auto r = spectrace::run_forward(cfg);
      std::cout << "pairs " << r.spectrum.pair_count() << " -> " << r.csv_path.string() << '\n';
      for (const auto& w : r.spectrum.warnings) std::cerr << "warning: " << w << '\n';
    } else if (traces->parsed()) {
      const auto r = spectrace::run_traces(cfg, spectrace::trace_kind_from_string(kind));
      std::cout << "alpha0 " << r.traces.alpha0 << " -> " << r.json_path.string() << '\n';
    } else if (invert->parsed()) {
      const auto r = spectrace::run_invert(cfg);
      for (const auto& w : r.run.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "status " << r.run.status << ", iterations " << r.run.steps() << ", l2_error "
                << r.l2_error << " -> " << r.run_path.string() << '\n';
      std::cout << "coeffs";
      for (double c : r.run.final.coeffs()) std::cout << ' ' << c;
      std::cout << '\n';
    } else if (table->parsed()) {
      if (!sweep_m.empty()) cfg.sweep_m = sweep_m;
      if (!sweep_size.empty()) cfg.sweep_size = sweep_size;
      for (const auto& row : spectrace::run_table(cfg))
        std::cout << "M=" << row.m << " K1=J=N=" << row.n << " l2_error=" << row.l2_error
                  << (row.converged ? "" : " (not converged)") << '\n';
    } else if (repro->parsed()) {
      const auto id = spectrace::example_from_string(repro_example);
      for (const auto& row : spectrace::run_reproduce(id, cfg))
        std::cout << row.name << " M=" << row.m << " J=" << row.j << " N=" << row.n
                  << " l2_error=" << row.l2_error << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
