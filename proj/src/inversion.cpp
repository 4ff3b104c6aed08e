#include "spectrace/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spectrace/quadrature.hpp"

namespace spectrace {

namespace {

struct Evaluation {
  Eigen::VectorXd residual;  // target - traces
  double norm = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd jacobian;
};

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v, int n) {
  return {v.data(), n};
}

Evaluation evaluate(const FourierDamping& a, const TraceVector& target, const GNConfig& cfg,
                    bool with_jacobian) {
  const ModalMatrixSet ms(a, cfg.j_trunc);
  Evaluation ev;
  if (with_jacobian) {
    TraceSensitivity s = tn_traces_with_jacobian(ms, target.alpha0, cfg.n_polys);
    ev.residual = as_vector(target.values, cfg.n_polys) - as_vector(s.traces.values, cfg.n_polys);
    ev.jacobian = std::move(s.jacobian);
  } else {
    TraceVector t = tn_matrix_traces(ms, target.alpha0, cfg.n_polys);
    ev.residual = as_vector(target.values, cfg.n_polys) - as_vector(t.values, cfg.n_polys);
  }
  ev.norm = ev.residual.norm();
  if (!std::isfinite(ev.norm)) ev.norm = std::numeric_limits<double>::infinity();
  return ev;
}

FourierDamping step(const FourierDamping& a, const Eigen::VectorXd& delta, double t) {
  std::vector<double> c = a.coeffs();
  for (std::size_t m = 0; m < c.size(); ++m) c[m] += t * delta(static_cast<Eigen::Index>(m));
  return FourierDamping(std::move(c));
}

}  // namespace

void GNConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("GNConfig: " + msg); };
  if (k_meas < 0) fail("k_meas must be >= 0");
  if (m_modes < 1) fail("m_modes must be >= 1");
  if (j_trunc < 1) fail("j_trunc must be >= 1");
  if (n_polys < 1) fail("n_polys must be >= 1");
  if (k_tail < k_meas) fail("k_tail must be >= k_meas");
  if (max_iter < 0) fail("max_iter must be >= 0");
  if (tol && !(*tol > 0.0)) fail("tol must be > 0");
  if (!(damping_factor > 0.0 && damping_factor < 1.0)) fail("damping_factor must lie in (0,1)");
  if (max_halvings < 0) fail("max_halvings must be >= 0");
  if (div_limit < 1) fail("div_limit must be >= 1");
}

std::vector<double> InversionRun::residual_norms() const {
  std::vector<double> out;
  out.reserve(iterations.size());
  for (const auto& it : iterations) out.push_back(it.residual_norm);
  return out;
}

double estimate_alpha0(const Spectrum& s, int k_use) {
  if (k_use < 2) throw std::invalid_argument("estimate_alpha0: need k_use >= 2");
  if (s.pair_count() < k_use)
    throw std::invalid_argument("estimate_alpha0: spectrum has only " +
                                std::to_string(s.pair_count()) + " pairs");
  const int first = k_use / 2 + 1;
  double sum = 0.0;
  int count = 0;
  for (int j = first; j <= k_use; ++j) {
    sum += s.at(j).real() + s.at(-j).real();
    count += 2;
  }
  return -2.0 * sum / count;
}

Eigen::MatrixXd trace_jacobian(const ModalMatrixSet& ms, double alpha0, int n_max) {
  return tn_traces_with_jacobian(ms, alpha0, n_max).jacobian;
}

InversionRun gauss_newton(const TraceVector& target, const GNConfig& cfg) {
  cfg.validate();
  if (target.kind != TraceKind::stabilized)
    throw std::invalid_argument("gauss_newton: target traces must be stabilized");
  if (target.size() < cfg.n_polys)
    throw std::invalid_argument("gauss_newton: target has " + std::to_string(target.size()) +
                                " traces, N = " + std::to_string(cfg.n_polys));

  InversionRun run;
  run.config = cfg;
  run.alpha0 = target.alpha0;
  run.target = target;
  run.target.values.resize(static_cast<std::size_t>(cfg.n_polys));
  if (cfg.m_modes > cfg.k_meas && cfg.k_meas > 0)
    run.warnings.push_back("M = " + std::to_string(cfg.m_modes) + " exceeds K = " +
                           std::to_string(cfg.k_meas) + ": more modes than measured pairs");
  if (cfg.j_trunc < cfg.m_modes)
    run.warnings.push_back("J smaller than M; high modes barely enter the modal matrices");

  FourierDamping a = cfg.initial_guess ? cfg.initial_guess->resized(cfg.m_modes)
                                       : FourierDamping::constant(target.alpha0).resized(cfg.m_modes);
  const double tol = cfg.tolerance();

  Evaluation ev = evaluate(a, run.target, cfg, true);
  run.iterations.push_back({a, ev.norm, 0, 0.0});
  run.status = "max_iter";
  int failures = 0;

  for (int it = 0;; ++it) {
    if (ev.norm <= tol) {
      run.converged = true;
      run.status = "converged";
      break;
    }
    if (it >= cfg.max_iter) break;
    if (!std::isfinite(ev.norm)) {
      run.status = "non_finite";
      break;
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ev.jacobian);
    cod.setThreshold(1e-13);
    const Eigen::VectorXd delta = cod.solve(ev.residual);
    const int rank = static_cast<int>(cod.rank());
    run.iterations.back().jacobian_rank = rank;
    if (rank < cfg.m_modes)
      run.warnings.push_back("iteration " + std::to_string(it + 1) + ": Jacobian rank " +
                             std::to_string(rank) + " < M; minimum-norm step");

    double t = 1.0;
    FourierDamping next = step(a, delta, 1.0);
    if (cfg.step_control == StepControl::damped) {
      bool accepted = false;
      double best_norm = std::numeric_limits<double>::infinity();
      double best_t = 1.0;
      for (int h = 0; h <= cfg.max_halvings; ++h, t *= cfg.damping_factor) {
        const FourierDamping cand = step(a, delta, t);
        const double norm = evaluate(cand, run.target, cfg, false).norm;
        if (norm < best_norm) {
          best_norm = norm;
          best_t = t;
        }
        if (norm < ev.norm) {
          accepted = true;
          break;
        }
      }
      t = best_t;
      next = step(a, delta, t);
      if (accepted) {
        failures = 0;
      } else if (++failures >= cfg.div_limit) {
        a = next;
        ev = evaluate(a, run.target, cfg, true);
        run.iterations.push_back({a, ev.norm, 0, t * delta.norm()});
        run.status = "diverged";
        run.warnings.push_back("residual failed to decrease for " + std::to_string(failures) +
                               " consecutive damped steps");
        break;
      }
    }
    a = next;
    ev = evaluate(a, run.target, cfg, true);
    run.iterations.push_back({a, ev.norm, 0, t * delta.norm()});
  }

  run.final = a;
  return run;
}

InversionRun multistep_schedule(const TraceVector& target, const GNConfig& cfg,
                                std::span<const int> m_schedule) {
  if (m_schedule.empty()) throw std::invalid_argument("multistep_schedule: empty schedule");
  for (std::size_t i = 1; i < m_schedule.size(); ++i)
    if (m_schedule[i] <= m_schedule[i - 1])
      throw std::invalid_argument("multistep_schedule: schedule must be increasing");

  InversionRun combined;
  GNConfig stage = cfg;
  for (std::size_t i = 0; i < m_schedule.size(); ++i) {
    stage.m_modes = m_schedule[i];
    if (i > 0) stage.initial_guess = combined.final.resized(stage.m_modes);
    InversionRun run = gauss_newton(target, stage);
    if (i == 0) {
      combined = std::move(run);
      continue;
    }
    // the first record of a later stage repeats the previous final iterate
    combined.iterations.insert(combined.iterations.end(), run.iterations.begin() + 1,
                               run.iterations.end());
    combined.warnings.insert(combined.warnings.end(), run.warnings.begin(), run.warnings.end());
    combined.converged = run.converged;
    combined.status = run.status;
    combined.final = run.final;
    combined.config = run.config;
  }
  combined.config.initial_guess = cfg.initial_guess;
  return combined;
}

double l2_error(const FourierDamping& a, const std::function<double(double)>& alpha_true,
                std::span<const double> breakpoints, int quad_nodes) {
  return integrate(
      [&](double x) {
        const double d = alpha_true(x) - a(x);
        return d * d;
      },
      quad_nodes, breakpoints);
}

double l2_error(const FourierDamping& a, const FourierDamping& alpha_true) {
  const FourierDamping d = alpha_true - a;
  double s = 0.0;
  for (int m = 0; m < d.size(); ++m) s += (m == 0 ? 1.0 : 0.5) * d[m] * d[m];
  return s;
}

std::string to_string(StepControl s) { return s == StepControl::full_step ? "full_step" : "damped"; }

void to_json(nlohmann::json& j, const GNConfig& c) {
  j = nlohmann::json{{"k", c.k_meas},
                     {"m", c.m_modes},
                     {"j", c.j_trunc},
                     {"n", c.n_polys},
                     {"k1", c.k_tail},
                     {"max_iter", c.max_iter},
                     {"tol", c.tolerance()},
                     {"step_control", to_string(c.step_control)},
                     {"damping_factor", c.damping_factor},
                     {"max_halvings", c.max_halvings},
                     {"div_limit", c.div_limit}};
  if (c.initial_guess)
    j["initial_guess"] = c.initial_guess->coeffs();
  else
    j["initial_guess"] = "alpha0_constant";
}

void from_json(const nlohmann::json& j, GNConfig& c) {
  c.k_meas = j.value("k", c.k_meas);
  c.m_modes = j.value("m", c.m_modes);
  c.j_trunc = j.value("j", c.j_trunc);
  c.n_polys = j.value("n", c.n_polys);
  c.k_tail = j.value("k1", c.k_tail);
  c.max_iter = j.value("max_iter", c.max_iter);
  if (j.contains("tol") && !j.at("tol").is_null()) c.tol = j.at("tol").get<double>();
  if (j.contains("step_control")) {
    const auto s = j.at("step_control").get<std::string>();
    if (s == "full_step")
      c.step_control = StepControl::full_step;
    else if (s == "damped")
      c.step_control = StepControl::damped;
    else
      throw std::invalid_argument("unknown step_control '" + s + "'");
  }
  c.damping_factor = j.value("damping_factor", c.damping_factor);
  c.max_halvings = j.value("max_halvings", c.max_halvings);
  c.div_limit = j.value("div_limit", c.div_limit);
  if (j.contains("initial_guess") && j.at("initial_guess").is_array())
    c.initial_guess = FourierDamping(j.at("initial_guess").get<std::vector<double>>());
}

void to_json(nlohmann::json& j, const InversionRun& r) {
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& it : r.iterations)
    iters.push_back({{"coeffs", it.coeffs.coeffs()},
                     {"residual_norm", it.residual_norm},
                     {"jacobian_rank", it.jacobian_rank},
                     {"step_length", it.step_length}});
  j = nlohmann::json{{"config", r.config},
                     {"alpha0", r.alpha0},
                     {"iterations", iters},
                     {"converged", r.converged},
                     {"status", r.status},
                     {"final", r.final.coeffs()},
                     {"warnings", r.warnings}};
}

}  // namespace spectrace
