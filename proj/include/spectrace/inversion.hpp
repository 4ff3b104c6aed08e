#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "spectrace/damping.hpp"
#include "spectrace/forward.hpp"
#include "spectrace/trace.hpp"

namespace spectrace {

enum class StepControl { full_step, damped };

struct GNConfig {
  int k_meas = 8;    // measured eigenvalue pairs (K)
  int m_modes = 4;   // cosine modes (M)
  int j_trunc = 100; // modal matrix size (J)
  int n_polys = 100; // highest polynomial degree (N)
  int k_tail = 100;  // pairs used in trace sums, measured + asymptotic (K1)
  int max_iter = 30;
  std::optional<double> tol;  // residual-norm stop; 1e-5 * N when unset
  std::optional<FourierDamping> initial_guess;
  StepControl step_control = StepControl::damped;
  double damping_factor = 0.5;
  int max_halvings = 8;
  int div_limit = 5;

  double tolerance() const { return tol.value_or(1e-5 * n_polys); }
  /// Throws std::invalid_argument on inconsistent sizes.
  void validate() const;
};

struct IterationRecord {
  FourierDamping coeffs;
  double residual_norm = 0.0;
  int jacobian_rank = 0;   // rank of the Jacobian used to leave this iterate
  double step_length = 0.0;
};

struct InversionRun {
  GNConfig config;
  double alpha0 = 0.0;
  TraceVector target;
  std::vector<IterationRecord> iterations;  // iterations[0] is the initial guess
  bool converged = false;
  std::string status;
  FourierDamping final;
  std::vector<std::string> warnings;

  std::vector<double> residual_norms() const;
  int steps() const { return iterations.empty() ? 0 : static_cast<int>(iterations.size()) - 1; }
};

/// -2 * mean(Re lambda_j) over the upper half (largest |Im|) of the first
/// k_use measured pairs.
double estimate_alpha0(const Spectrum& s, int k_use);

/// d trace(T_n(a)) / d a_m, n = 1..n_max, m = 1..M.
Eigen::MatrixXd trace_jacobian(const ModalMatrixSet& ms, double alpha0, int n_max);

/// Gauss-Newton on r_true - trace(T_n(a)). Uses target.alpha0 inside the
/// polynomials for the whole run.
InversionRun gauss_newton(const TraceVector& target, const GNConfig& cfg);

/// Chains Gauss-Newton runs with growing M, zero-padding each result into
/// the next initial guess. History is concatenated.
InversionRun multistep_schedule(const TraceVector& target, const GNConfig& cfg,
                                std::span<const int> m_schedule);

/// int_0^1 |alpha_true - alpha_M|^2 dx (squared L2 distance) by
/// Clenshaw-Curtis quadrature, split at breakpoints of alpha_true.
double l2_error(const FourierDamping& a, const std::function<double(double)>& alpha_true,
                std::span<const double> breakpoints = {}, int quad_nodes = 512);
double l2_error(const FourierDamping& a, const FourierDamping& alpha_true);

std::string to_string(StepControl s);
void to_json(nlohmann::json& j, const GNConfig& c);
void from_json(const nlohmann::json& j, GNConfig& c);
void to_json(nlohmann::json& j, const InversionRun& r);

}  // namespace spectrace
