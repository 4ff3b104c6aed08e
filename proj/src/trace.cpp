#include "spectrace/trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace spectrace {

namespace {

constexpr double kPi = std::numbers::pi;

double round15(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

Eigen::SparseMatrix<double> to_sparse(const Eigen::MatrixXd& m) {
  return m.sparseView(0.0, 0.0);
}

void check_imag(cplx v, int n, const char* who) {
  if (std::abs(v.imag()) > 1e-10 * (1.0 + std::abs(v.real())))
    throw std::runtime_error(std::string(who) + ": imaginary residual " + std::to_string(v.imag()) +
                             " at n = " + std::to_string(n) +
                             " (spectrum not closed under conjugation?)");
}

// Pairs (lambda_j, lambda_{-j}) for j = k_tail .. 1, measured below k_meas and
// asymptotic above. Largest |j| first so small terms are added first.
template <class Visit>
void for_each_pair_descending(const Spectrum& s, double alpha0, int k_meas, int k_tail,
                              const char* who, Visit&& visit) {
  if (k_meas < 0 || k_tail < k_meas)
    throw std::invalid_argument(std::string(who) + ": need 0 <= k_meas <= k_tail");
  if (s.pair_count() < k_meas)
    throw std::invalid_argument(std::string(who) + ": spectrum has " +
                                std::to_string(s.pair_count()) + " pairs, k_meas = " +
                                std::to_string(k_meas));
  for (int j = k_tail; j >= 1; --j) {
    if (j <= k_meas) {
      visit(s.at(j), s.at(-j));
    } else {
      const cplx lam(-0.5 * alpha0, j * kPi);
      visit(lam, std::conj(lam));
    }
  }
}

}  // namespace

Eigen::MatrixXd build_m1_basis(int m, int j_trunc) {
  if (m < 1 || j_trunc < 1) throw std::invalid_argument("build_m1_basis: need m >= 1, j_trunc >= 1");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(j_trunc, j_trunc);
  const int k = 2 * m - 2;
  for (int j = 1; j <= j_trunc; ++j) {
    const double h = 1.0 / (2.0 * kPi * kPi * j * j);
    for (int i = 1; i <= j_trunc; ++i) {
      double v = 0.0;
      if (i + j + k == 0)  // unreachable for positive indices; kept as in the case list
        v = h;
      else if (i + j - k == 0)
        v = h;
      else if (m != 1 && (i - j + k == 0 || i - j - k == 0))
        v = -h;
      else if (i == j && m == 1)
        v = -2.0 * h;
      out(i - 1, j - 1) = v;
    }
  }
  return out;
}

ModalMatrixSet::ModalMatrixSet(const FourierDamping& a, int j_trunc)
    : damping_(a), j_trunc_(j_trunc) {
  if (j_trunc < 1) throw std::invalid_argument("ModalMatrixSet: need j_trunc >= 1");
  if (a.empty()) throw std::invalid_argument("ModalMatrixSet: damping has no coefficients");
  if (j_trunc < a.size())
    warnings.push_back("j_trunc = " + std::to_string(j_trunc) + " is smaller than M = " +
                       std::to_string(a.size()));
  m1_a_ = Eigen::MatrixXd::Zero(j_trunc, j_trunc);
  for (int m = 1; m <= a.size(); ++m) {
    basis_.push_back(build_m1_basis(m, j_trunc));
    basis_sparse_.push_back(to_sparse(basis_.back()));
    m1_a_ += a[m - 1] * basis_.back();
  }
  m1_one_ = basis_.front();
  m1_one_diag_ = m1_one_.diagonal();
  m1_a_sparse_ = to_sparse(m1_a_);
}

ModalMatrixSet build_modal_set(const FourierDamping& a, int j_trunc) {
  return ModalMatrixSet(a, j_trunc);
}

std::string to_string(TraceKind k) { return k == TraceKind::raw_power ? "raw_power" : "stabilized"; }

TraceKind trace_kind_from_string(const std::string& s) {
  if (s == "raw_power") return TraceKind::raw_power;
  if (s == "stabilized") return TraceKind::stabilized;
  throw std::invalid_argument("unknown trace kind '" + s + "'");
}

void to_json(nlohmann::json& j, const TraceVector& t) {
  std::vector<double> vals(t.values.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = round15(t.values[i]);
  j = nlohmann::json{{"kind", to_string(t.kind)}, {"alpha0", round15(t.alpha0)}, {"values", vals}};
}

void from_json(const nlohmann::json& j, TraceVector& t) {
  t.kind = trace_kind_from_string(j.at("kind").get<std::string>());
  t.alpha0 = j.at("alpha0").get<double>();
  t.values = j.at("values").get<std::vector<double>>();
}

std::string dump_trace_json(const TraceVector& t) {
  nlohmann::json j = t;
  return j.dump(2);
}

TraceVector mn_traces(const ModalMatrixSet& ms, int n_max) {
  if (n_max < 1) throw std::invalid_argument("mn_traces: need n_max >= 1");
  TraceVector out;
  out.kind = TraceKind::raw_power;
  out.values.reserve(static_cast<std::size_t>(n_max));

  const auto& a = ms.m1_a_sparse();
  const auto& e = ms.m1_one_diag();
  Eigen::MatrixXd prev = ms.m1_a();
  out.values.push_back(prev.trace());
  if (n_max == 1) return out;
  Eigen::MatrixXd cur = prev * a;
  cur.diagonal() += 2.0 * e;
  out.values.push_back(cur.trace());
  for (int n = 3; n <= n_max; ++n) {
    Eigen::MatrixXd next = cur * a;
    next += prev * e.asDiagonal();
    prev = std::move(cur);
    cur = std::move(next);
    out.values.push_back(cur.trace());
  }
  return out;
}

cplx tn_scalar(cplx z, int n, double alpha0) {
  if (n < 1) throw std::invalid_argument("tn_scalar: need n >= 1");
  const cplx factor = alpha0 * z + 1.0;
  cplx t = z;
  for (int k = 1; k < n; ++k) t *= factor;
  return t;
}

cplx tn_scalar_three_term(cplx z, int n, double alpha0) {
  if (n < 1) throw std::invalid_argument("tn_scalar_three_term: need n >= 1");
  cplx prev = z;
  if (n == 1) return prev;
  cplx cur = z * (alpha0 * z + 1.0);
  const cplx c2 = alpha0 * alpha0 * z * z;
  for (int k = 2; k < n; ++k) {
    const cplx next = 2.0 * cur - prev + c2 * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// T_{n+1} = 2 T_n - T_{n-1} + a0^2 T_{n-1} M1(e1) + a0 (T_n - T_{n-1}) M1(a),
// and the same recursion differentiated with respect to every a_m.
TraceSensitivity stabilized_recursion(const ModalMatrixSet& ms, double alpha0, int n_max,
                                      bool with_jacobian) {
  if (n_max < 1) throw std::invalid_argument("tn_matrix_traces: need n_max >= 1");
  const int modes = ms.modes();
  const auto& a = ms.m1_a_sparse();
  const auto e = ms.m1_one_diag().asDiagonal();
  const double a0sq = alpha0 * alpha0;

  TraceSensitivity out;
  out.traces.kind = TraceKind::stabilized;
  out.traces.alpha0 = alpha0;
  out.traces.values.reserve(static_cast<std::size_t>(n_max));
  if (with_jacobian) out.jacobian = Eigen::MatrixXd::Zero(n_max, modes);

  Eigen::MatrixXd t_prev = ms.m1_a();
  out.traces.values.push_back(t_prev.trace());
  std::vector<Eigen::MatrixXd> d_prev, d_cur;
  if (with_jacobian)
    for (int m = 1; m <= modes; ++m) out.jacobian(0, m - 1) = ms.basis(m).trace();
  if (n_max == 1) return out;

  // T_2 = a0 (2 M1(e1) + M1(a)^2) + M1(a)
  Eigen::MatrixXd t_cur = alpha0 * (t_prev * a);
  t_cur.diagonal() += 2.0 * alpha0 * ms.m1_one_diag();
  t_cur += t_prev;
  out.traces.values.push_back(t_cur.trace());

  if (with_jacobian) {
    d_prev.reserve(modes);
    d_cur.reserve(modes);
    for (int m = 1; m <= modes; ++m) {
      const auto& em = ms.basis_sparse(m);
      d_prev.push_back(ms.basis(m));
      // dT_2/da_m = M1(e_m) + a0 M1(a) M1(e_m) + a0 M1(e_m) M1(a)
      Eigen::MatrixXd d = ms.basis(m);
      d += alpha0 * (ms.m1_a() * em);
      d += alpha0 * (ms.basis(m) * a);
      out.jacobian(1, m - 1) = d.trace();
      d_cur.push_back(std::move(d));
    }
  }

  Eigen::MatrixXd diff, t_next, dd;
  for (int n = 2; n < n_max; ++n) {
    diff = t_cur - t_prev;
    t_next = 2.0 * t_cur - t_prev;
    t_next.noalias() += a0sq * (t_prev * e);
    t_next.noalias() += alpha0 * (diff * a);
    out.traces.values.push_back(t_next.trace());

    if (with_jacobian) {
      for (int m = 1; m <= modes; ++m) {
        auto& dp = d_prev[m - 1];
        auto& dc = d_cur[m - 1];
        dd = dc - dp;
        Eigen::MatrixXd dn = 2.0 * dc - dp;
        dn.noalias() += a0sq * (dp * e);
        dn.noalias() += alpha0 * (dd * a);
        dn.noalias() += alpha0 * (diff * ms.basis_sparse(m));
        out.jacobian(n, m - 1) = dn.trace();
        dp = std::move(dc);
        dc = std::move(dn);
      }
    }
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }
  return out;
}

}  // namespace

TraceVector tn_matrix_traces(const ModalMatrixSet& ms, double alpha0, int n_max) {
  return stabilized_recursion(ms, alpha0, n_max, false).traces;
}

TraceSensitivity tn_traces_with_jacobian(const ModalMatrixSet& ms, double alpha0, int n_max) {
  return stabilized_recursion(ms, alpha0, n_max, true);
}

TraceVector spectral_traces(const Spectrum& s, double alpha0, int n_max, int k_meas, int k_tail) {
  if (n_max < 1) throw std::invalid_argument("spectral_traces: need n_max >= 1");
  std::vector<cplx> acc(static_cast<std::size_t>(n_max), 0.0);
  for_each_pair_descending(s, alpha0, k_meas, k_tail, "spectral_traces", [&](cplx lp, cplx ln) {
    const cplx zp = 1.0 / lp, zn = 1.0 / ln;
    const cplx fp = alpha0 * zp + 1.0, fn = alpha0 * zn + 1.0;
    cplx tp = zp, tn = zn;
    for (int n = 0; n < n_max; ++n) {
      acc[n] += tp + tn;
      tp *= fp;
      tn *= fn;
    }
  });
  TraceVector out;
  out.kind = TraceKind::stabilized;
  out.alpha0 = alpha0;
  out.values.resize(acc.size());
  for (int n = 0; n < n_max; ++n) {
    check_imag(acc[n], n + 1, "spectral_traces");
    out.values[n] = acc[n].real();
  }
  return out;
}

TraceVector raw_power_traces(const Spectrum& s, int n_max, int k_meas, int k_tail, double alpha0) {
  if (n_max < 1) throw std::invalid_argument("raw_power_traces: need n_max >= 1");
  std::vector<cplx> acc(static_cast<std::size_t>(n_max), 0.0);
  for_each_pair_descending(s, alpha0, k_meas, k_tail, "raw_power_traces", [&](cplx lp, cplx ln) {
    const cplx zp = 1.0 / lp, zn = 1.0 / ln;
    cplx pp = zp, pn = zn;
    for (int n = 0; n < n_max; ++n) {
      acc[n] += pp + pn;
      pp *= zp;
      pn *= zn;
    }
  });
  TraceVector out;
  out.kind = TraceKind::raw_power;
  out.alpha0 = alpha0;
  out.values.resize(acc.size());
  for (int n = 0; n < n_max; ++n) {
    check_imag(acc[n], n + 1, "raw_power_traces");
    out.values[n] = acc[n].real();
  }
  return out;
}

}  // namespace spectrace
