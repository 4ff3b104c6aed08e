#include "spectrace/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spectrace {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

DampingProfile series_profile(std::string name, std::vector<double> coeffs) {
  FourierDamping a(std::move(coeffs));
  DampingProfile p;
  p.name = std::move(name);
  p.alpha = [a](double x) { return a(x); };
  p.exact_series = a;
  return p;
}

std::string run_json_text(const InversionRun& run, const DampingProfile& truth, double l2) {
  nlohmann::json j = run;
  j["damping"] = truth.name;
  j["l2_error_vs_truth"] = l2;
  if (!run.config.initial_guess) j["initial_guess_policy"] = "a1 = alpha0 estimate, other modes 0";
  return j.dump(2);
}

}  // namespace

std::string to_string(ExampleId id) {
  switch (id) {
    case ExampleId::ex1: return "ex1";
    case ExampleId::ex2: return "ex2";
    case ExampleId::ex3: return "ex3";
    case ExampleId::ex4: return "ex4";
    case ExampleId::ex5: return "ex5";
    case ExampleId::custom: return "custom";
  }
  return "custom";
}

ExampleId example_from_string(const std::string& s) {
  for (auto id : {ExampleId::ex1, ExampleId::ex2, ExampleId::ex3, ExampleId::ex4, ExampleId::ex5,
                  ExampleId::custom})
    if (to_string(id) == s) return id;
  throw std::invalid_argument("unknown example '" + s + "' (expected ex1..ex5 or custom)");
}

DampingProfile example_damping(ExampleId id) {
  switch (id) {
    case ExampleId::ex1: {
      DampingProfile p;
      p.name = "ex1";
      p.alpha = [](double x) {
        const double s = x - 0.5;
        return -std::exp(-s * s) + 8.0 * std::pow(s, 4) + 6.0 * s * s + 1.25;
      };
      return p;
    }
    case ExampleId::ex2:
      return series_profile("ex2", {1.4062, -0.6951, 0.2967, 0.1368, -0.2103, 0.031, 0.153,
                                    -0.0718, -0.0512, 0.1258, 0.04, 0.02, -0.0132, 0.02, 0.02});
    case ExampleId::ex3: {
      DampingProfile p;
      p.name = "ex3";
      // [0,0.3] -> 2, (0.3,0.7) -> 3, [0.7,1] -> 2
      p.alpha = [](double x) { return (x > 0.3 && x < 0.7) ? 3.0 : 2.0; };
      p.breakpoints = {0.3, 0.7};
      return p;
    }
    case ExampleId::ex4:
      return series_profile("ex4", {1.5, 0.2, 0.1, -0.04, 0.03});
    case ExampleId::ex5: {
      std::vector<double> c{1.5567, 1.4896, 0.3, 0.1, 0.2, 0.2, 0.2};
      for (double& v : c) v *= kPi;
      return series_profile("ex5", std::move(c));
    }
    case ExampleId::custom: break;
  }
  throw std::invalid_argument("example_damping: custom damping needs explicit coefficients");
}

DampingProfile ExperimentConfig::damping() const {
  if (example != ExampleId::custom) return example_damping(example);
  if (!custom_damping) throw std::invalid_argument("custom example requires a damping");
  return series_profile("custom", custom_damping->coeffs());
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig c;
  c.name = j.value("name", std::string{});
  c.example = example_from_string(j.value("example", std::string("ex1")));
  if (j.contains("damping")) {
    const auto& d = j.at("damping");
    if (d.is_array())
      c.custom_damping = FourierDamping(d.get<std::vector<double>>());
    else if (d.is_object() && d.contains("constant"))
      c.custom_damping = FourierDamping::constant(d.at("constant").get<double>());
    else if (d.is_object() && d.contains("coeffs"))
      c.custom_damping = FourierDamping(d.at("coeffs").get<std::vector<double>>());
    else
      throw std::invalid_argument("config: 'damping' must be a list or {constant|coeffs}");
    if (!j.contains("example")) c.example = ExampleId::custom;
  }
  c.n_cheb = j.value("n_cheb", c.n_cheb);
  if (j.contains("gn")) c.gn = j.at("gn").get<GNConfig>();
  c.m_schedule = j.value("m_schedule", c.m_schedule);
  if (j.contains("noise")) {
    c.noise.delta = j.at("noise").value("delta", 0.0);
    c.noise.seed = j.at("noise").value("seed", std::uint64_t{0});
  }
  if (j.contains("target")) {
    const auto t = j.at("target").get<std::string>();
    if (t == "spectrum")
      c.target = TargetMode::spectrum;
    else if (t == "inverse_crime")
      c.target = TargetMode::inverse_crime;
    else
      throw std::invalid_argument("config: unknown target '" + t + "'");
  }
  if (j.contains("spectrum_file")) c.spectrum_file = j.at("spectrum_file").get<std::string>();
  c.output_dir = j.value("output_dir", c.output_dir.string());
  c.emit_plots = j.value("emit_plots", c.emit_plots);
  if (j.contains("sweep")) {
    c.sweep_m = j.at("sweep").value("m", std::vector<int>{});
    c.sweep_size = j.at("sweep").value("size", std::vector<int>{});
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open config " + p.string());
  return parse_experiment_config(nlohmann::json::parse(in));
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"name", c.name},
                   {"example", to_string(c.example)},
                   {"n_cheb", c.n_cheb},
                   {"gn", c.gn},
                   {"m_schedule", c.m_schedule},
                   {"noise", {{"delta", c.noise.delta}, {"seed", c.noise.seed}}},
                   {"target", c.target == TargetMode::spectrum ? "spectrum" : "inverse_crime"},
                   {"output_dir", c.output_dir.string()},
                   {"emit_plots", c.emit_plots},
                   {"sweep", {{"m", c.sweep_m}, {"size", c.sweep_size}}}};
  if (c.custom_damping) j["damping"] = c.custom_damping->coeffs();
  if (c.spectrum_file) j["spectrum_file"] = c.spectrum_file->string();
  return j;
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<double> sample_on_grid(const DampingProfile& p, const GridOperator& g) {
  std::vector<double> out(static_cast<std::size_t>(g.interior_size()));
  for (int i = 0; i < g.interior_size(); ++i) out[i] = p.alpha(g.grid_x(i));
  return out;
}

Spectrum generate_spectrum(const ExperimentConfig& cfg) {
  const GridOperator g = build_grid_operator(cfg.n_cheb);
  return forward_spectrum(g, sample_on_grid(cfg.damping(), g), 0);
}

ForwardResult run_forward(const ExperimentConfig& cfg) {
  ForwardResult r;
  r.spectrum = generate_spectrum(cfg);
  std::ostringstream os;
  write_spectrum_csv(os, r.spectrum);
  const std::string stem = cfg.name.empty() ? cfg.damping().name : cfg.name;
  r.csv_path = cfg.output_dir / ("spectrum_" + stem + ".csv");
  write_file_atomic(r.csv_path, os.str());
  return r;
}

Spectrum measured_spectrum(const ExperimentConfig& cfg) {
  Spectrum s;
  if (cfg.spectrum_file) {
    std::ifstream in(*cfg.spectrum_file);
    if (!in) throw std::runtime_error("cannot open spectrum " + cfg.spectrum_file->string());
    s = read_spectrum_csv(in);
  } else {
    s = generate_spectrum(cfg);
  }
  return add_noise(s, cfg.noise);
}

TracesResult run_traces(const ExperimentConfig& cfg, TraceKind kind) {
  const Spectrum s = measured_spectrum(cfg);
  const int k = cfg.gn.k_meas;
  const double alpha0 = estimate_alpha0(s, k);
  TracesResult r;
  r.traces = kind == TraceKind::stabilized
                 ? spectral_traces(s, alpha0, cfg.gn.n_polys, k, cfg.gn.k_tail)
                 : raw_power_traces(s, cfg.gn.n_polys, k, cfg.gn.k_tail, alpha0);
  const std::string stem = cfg.name.empty() ? cfg.damping().name : cfg.name;
  r.json_path = cfg.output_dir / ("traces_" + stem + ".json");
  write_file_atomic(r.json_path, dump_trace_json(r.traces));
  return r;
}

namespace {

struct Prepared {
  TraceVector target;
  GNConfig gn;
};

Prepared prepare_target(const ExperimentConfig& cfg, const DampingProfile& truth,
                        const Spectrum* measured) {
  Prepared p;
  p.gn = cfg.gn;
  if (cfg.target == TargetMode::inverse_crime) {
    const FourierDamping series =
        truth.exact_series ? *truth.exact_series
                           : FourierDamping::project(truth.alpha, cfg.gn.m_modes, truth.breakpoints);
    p.target = tn_matrix_traces(ModalMatrixSet(series, cfg.gn.j_trunc), series.mean(), cfg.gn.n_polys);
    return p;
  }
  const double alpha0 = estimate_alpha0(*measured, std::max(2, cfg.gn.k_meas));
  p.target = spectral_traces(*measured, alpha0, cfg.gn.n_polys, cfg.gn.k_meas, cfg.gn.k_tail);
  return p;
}

InversionRun solve(const ExperimentConfig& cfg, const Prepared& p) {
  return cfg.m_schedule.empty() ? gauss_newton(p.target, p.gn)
                                : multistep_schedule(p.target, p.gn, cfg.m_schedule);
}

}  // namespace

std::string plot_csv(const DampingProfile& truth, const FourierDamping& rec, const FourierDamping& init) {
  std::ostringstream os;
  os << "x,alpha_true,alpha_rec,alpha_init\n" << std::setprecision(15);
  for (int i = 0; i <= 400; ++i) {
    const double x = i / 400.0;
    os << x << ',' << truth.alpha(x) << ',' << rec(x) << ',' << init(x) << '\n';
  }
  return os.str();
}

InvertResult invert_spectrum(const ExperimentConfig& cfg, const Spectrum& measured, const std::string& tag) {
  const DampingProfile truth = cfg.damping();
  const Prepared p = prepare_target(cfg, truth, &measured);
  InvertResult r;
  r.run = solve(cfg, p);
  r.l2_error = l2_error(r.run.final, truth.alpha, truth.breakpoints);
  const std::string stem = cfg.name.empty() ? truth.name + "_" + tag : cfg.name;
  r.run_path = cfg.output_dir / ("run_" + stem + ".json");
  write_file_atomic(r.run_path, run_json_text(r.run, truth, r.l2_error));
  if (cfg.emit_plots) {
    r.plot_path = cfg.output_dir / ("plot_" + stem + ".csv");
    write_file_atomic(r.plot_path, plot_csv(truth, r.run.final, r.run.iterations.front().coeffs));
  }
  return r;
}

InvertResult run_invert(const ExperimentConfig& cfg, const std::string& tag) {
  if (cfg.target == TargetMode::inverse_crime) return invert_spectrum(cfg, Spectrum{}, tag);
  return invert_spectrum(cfg, measured_spectrum(cfg), tag);
}

std::vector<TableRow> run_table(const ExperimentConfig& cfg, unsigned workers) {
  if (cfg.sweep_m.empty() || cfg.sweep_size.empty())
    throw std::invalid_argument("run_table: sweep needs at least one M and one size");
  const DampingProfile truth = cfg.damping();
  Spectrum measured;
  if (cfg.target == TargetMode::spectrum) measured = measured_spectrum(cfg);

  std::vector<ExperimentConfig> jobs;
  for (int size : cfg.sweep_size)
    for (int m : cfg.sweep_m) {
      ExperimentConfig c = cfg;
      c.gn.m_modes = m;
      c.gn.k_tail = c.gn.j_trunc = c.gn.n_polys = size;
      jobs.push_back(std::move(c));
    }

  std::vector<TableRow> rows(jobs.size());
  auto work = [&](std::size_t i) {
    const auto& c = jobs[i];
    const Prepared p = prepare_target(c, truth, &measured);
    const InversionRun run = solve(c, p);
    TableRow row;
    row.m = c.gn.m_modes;
    row.k1 = c.gn.k_tail;
    row.j = c.gn.j_trunc;
    row.n = c.gn.n_polys;
    row.l2_error = c.target == TargetMode::inverse_crime && truth.exact_series
                       ? l2_error(run.final, truth.exact_series->resized(c.gn.m_modes))
                       : l2_error(run.final, truth.alpha, truth.breakpoints);
    row.iterations = run.steps();
    row.converged = run.converged;
    rows[i] = row;
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < jobs.size(); start += workers) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < std::min(jobs.size(), start + workers); ++i)
      batch.push_back(std::async(std::launch::async, work, i));
    for (auto& f : batch) f.get();
  }

  write_file_atomic(cfg.output_dir / ("table_" + (cfg.name.empty() ? truth.name : cfg.name) + ".csv"),
                    table_csv(rows));
  return rows;
}

std::string table_csv(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << "M,K1,J,N,l2_error,iterations,converged\n" << std::setprecision(15);
  for (const auto& r : rows)
    os << r.m << ',' << r.k1 << ',' << r.j << ',' << r.n << ',' << r.l2_error << ',' << r.iterations
       << ',' << (r.converged ? "true" : "false") << '\n';
  return os.str();
}

std::vector<ExperimentConfig> reproduction_presets(ExampleId id, const ExperimentConfig& base) {
  std::vector<ExperimentConfig> out;
  auto make = [&](int k, int m, int size, int n) {
    ExperimentConfig c = base;
    c.example = id;
    c.gn.k_meas = k;
    c.gn.m_modes = m;
    c.gn.j_trunc = c.gn.k_tail = size;
    c.gn.n_polys = n;
    c.gn.tol.reset();
    c.gn.initial_guess.reset();
    c.m_schedule.clear();
    c.sweep_m.clear();
    c.sweep_size.clear();
    std::ostringstream name;
    name << to_string(id) << "_K" << k << "_M" << m << "_J" << size << "_N" << n;
    c.name = name.str();
    return c;
  };

  switch (id) {
    case ExampleId::ex1: {
      for (int m : {5, 7, 9}) out.push_back(make(8, m, 150, 150));
      ExperimentConfig table = make(8, 3, 25, 25);
      table.name = "ex1_table";
      table.sweep_m = {3, 4, 5, 6, 7, 8};
      table.sweep_size = {25, 50, 100, 150};
      out.push_back(table);
      break;
    }
    case ExampleId::ex2:
      for (int k : {4, 10, 50})
        for (int m : {8, 10, 12}) out.push_back(make(k, m, 100, 300));
      break;
    case ExampleId::ex3:
      for (int m = 4; m <= 9; ++m) out.push_back(make(10, m, 100, 100));
      break;
    case ExampleId::ex4:
      for (double delta : {0.001, 0.005, 0.01})
        for (int m = 3; m <= 6; ++m) {
          ExperimentConfig c = make(m, m, 75, 75);
          c.noise.delta = delta;
          std::ostringstream name;
          name << c.name << "_delta" << delta;
          c.name = name.str();
          out.push_back(c);
        }
      break;
    case ExampleId::ex5:
      for (int m : {6, 7, 8})
        for (int n : {25, 30, 35}) {
          ExperimentConfig c = make(m, m, 75, n);
          c.m_schedule = {3, 5, m};
          out.push_back(c);
        }
      break;
    case ExampleId::custom:
      throw std::invalid_argument("reproduce: no presets for custom dampings");
  }
  return out;
}

std::vector<ReproduceSummaryRow> run_reproduce(ExampleId id, const ExperimentConfig& base) {
  ExperimentConfig fwd = base;
  fwd.example = id;
  fwd.name = to_string(id);
  const ForwardResult forward = run_forward(fwd);

  std::vector<ReproduceSummaryRow> rows;
  for (const ExperimentConfig& c : reproduction_presets(id, base)) {
    if (!c.sweep_m.empty()) {
      ExperimentConfig t = c;
      t.spectrum_file = forward.csv_path;
      for (const TableRow& tr : run_table(t))
        rows.push_back({c.name, c.gn.k_meas, tr.m, tr.j, tr.n, c.noise.delta, tr.l2_error,
                        tr.iterations, tr.converged});
      continue;
    }
    const Spectrum measured = add_noise(forward.spectrum, c.noise);
    const InvertResult r = invert_spectrum(c, measured);
    rows.push_back({c.name, c.gn.k_meas, c.gn.m_modes, c.gn.j_trunc, c.gn.n_polys, c.noise.delta,
                    r.l2_error, r.run.steps(), r.run.converged});
  }

  std::ostringstream os;
  os << "name,K,M,J,N,delta,l2_error,iterations,converged\n" << std::setprecision(15);
  for (const auto& r : rows)
    os << r.name << ',' << r.k << ',' << r.m << ',' << r.j << ',' << r.n << ',' << r.delta << ','
       << r.l2_error << ',' << r.iterations << ',' << (r.converged ? "true" : "false") << '\n';
  write_file_atomic(base.output_dir / ("summary_" + to_string(id) + ".csv"), os.str());
  return rows;
}

}  // namespace spectrace
