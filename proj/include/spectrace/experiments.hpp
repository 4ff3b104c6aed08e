#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectrace/damping.hpp"
#include "spectrace/forward.hpp"
#include "spectrace/inversion.hpp"
#include "spectrace/trace.hpp"

namespace spectrace {

enum class ExampleId { ex1, ex2, ex3, ex4, ex5, custom };

std::string to_string(ExampleId id);
ExampleId example_from_string(const std::string& s);

/// A damping profile with the interior breakpoints needed to integrate it.
struct DampingProfile {
  std::string name;
  std::function<double(double)> alpha;
  std::vector<double> breakpoints;
  std::optional<FourierDamping> exact_series;  // set when alpha is a finite cosine series
};

/// Closed-form dampings of the five reference examples.
DampingProfile example_damping(ExampleId id);

enum class TargetMode { spectrum, inverse_crime };

struct ExperimentConfig {
  std::string name;  // tag used for output file names
  ExampleId example = ExampleId::ex1;
  std::optional<FourierDamping> custom_damping;  // used when example == custom
  int n_cheb = 400;
  GNConfig gn;
  std::vector<int> m_schedule;  // empty: single Gauss-Newton run
  NoiseModel noise;
  TargetMode target = TargetMode::spectrum;
  std::optional<std::filesystem::path> spectrum_file;
  std::filesystem::path output_dir = "out";
  bool emit_plots = true;
  // table sweep: every (M, size) pair with K1 = J = N = size
  std::vector<int> sweep_m;
  std::vector<int> sweep_size;

  DampingProfile damping() const;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& p);
nlohmann::json to_json(const ExperimentConfig& c);

/// Writes `text` to `path` via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Samples the profile pointwise on the interior collocation nodes.
std::vector<double> sample_on_grid(const DampingProfile& p, const GridOperator& g);

/// Forward problem for the configured damping; every trustworthy pair.
Spectrum generate_spectrum(const ExperimentConfig& cfg);

struct ForwardResult {
  Spectrum spectrum;
  std::filesystem::path csv_path;
};
ForwardResult run_forward(const ExperimentConfig& cfg);

/// Spectrum used for inversion: read from file or generated, then noised.
Spectrum measured_spectrum(const ExperimentConfig& cfg);

struct TracesResult {
  TraceVector traces;
  std::filesystem::path json_path;
};
TracesResult run_traces(const ExperimentConfig& cfg, TraceKind kind = TraceKind::stabilized);

struct InvertResult {
  InversionRun run;
  double l2_error = 0.0;
  std::filesystem::path run_path;
  std::filesystem::path plot_path;
};

/// Inversion against an already measured spectrum (skips the eigensolve).
InvertResult invert_spectrum(const ExperimentConfig& cfg, const Spectrum& measured,
                             const std::string& tag = "run");
InvertResult run_invert(const ExperimentConfig& cfg, const std::string& tag = "run");

struct TableRow {
  int m = 0, k1 = 0, j = 0, n = 0;
  double l2_error = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Sweeps (M, K1 = J = N) and writes table.csv. Runs are independent and
/// are fanned out over `workers` threads (0 = hardware concurrency).
std::vector<TableRow> run_table(const ExperimentConfig& cfg, unsigned workers = 0);
std::string table_csv(const std::vector<TableRow>& rows);

/// Plot CSV `x,alpha_true,alpha_rec,alpha_init` on 401 uniform points.
std::string plot_csv(const DampingProfile& truth, const FourierDamping& rec,
                     const FourierDamping& init);

/// Reference presets for the five examples, rooted at `base`.
std::vector<ExperimentConfig> reproduction_presets(ExampleId id, const ExperimentConfig& base);

struct ReproduceSummaryRow {
  std::string name;
  int k = 0, m = 0, j = 0, n = 0;
  double delta = 0.0;
  double l2_error = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Forward solve once, then every preset; writes summary.csv and one run
/// JSON plus plot CSV per preset under base.output_dir.
std::vector<ReproduceSummaryRow> run_reproduce(ExampleId id, const ExperimentConfig& base);

}  // namespace spectrace
