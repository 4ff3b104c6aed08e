#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "spectrace/damping.hpp"
#include "spectrace/forward.hpp"

namespace spectrace {

/// Entry (i,j) of M1(e_m) = -(2 / (pi^2 j^2)) * int sin(i pi x) sin(j pi x) cos(2(m-1) pi x) dx,
/// evaluated from the closed-form case list (1-based i, j, m).
Eigen::MatrixXd build_m1_basis(int m, int j_trunc);

/// Modal matrices of a FourierDamping in the Dirichlet sine basis.
/// Immutable once built.
class ModalMatrixSet {
 public:
  ModalMatrixSet(const FourierDamping& a, int j_trunc);

  int j_trunc() const { return j_trunc_; }
  int modes() const { return static_cast<int>(basis_.size()); }
  const FourierDamping& damping() const { return damping_; }

  const Eigen::MatrixXd& basis(int m) const { return basis_[static_cast<std::size_t>(m - 1)]; }
  const Eigen::MatrixXd& m1_a() const { return m1_a_; }
  /// M1(e_1) = -diag(1 / (pi^2 j^2)).
  const Eigen::MatrixXd& m1_one() const { return m1_one_; }
  const Eigen::VectorXd& m1_one_diag() const { return m1_one_diag_; }

  // Sparse copies used by the recursions; each M1(e_m) has at most three
  // nonzeros per column.
  const Eigen::SparseMatrix<double>& basis_sparse(int m) const {
    return basis_sparse_[static_cast<std::size_t>(m - 1)];
  }
  const Eigen::SparseMatrix<double>& m1_a_sparse() const { return m1_a_sparse_; }

  std::vector<std::string> warnings;

 private:
  FourierDamping damping_;
  int j_trunc_;
  std::vector<Eigen::MatrixXd> basis_;
  Eigen::MatrixXd m1_a_;
  Eigen::MatrixXd m1_one_;
  Eigen::VectorXd m1_one_diag_;
  std::vector<Eigen::SparseMatrix<double>> basis_sparse_;
  Eigen::SparseMatrix<double> m1_a_sparse_;
};

ModalMatrixSet build_modal_set(const FourierDamping& a, int j_trunc);

enum class TraceKind { raw_power, stabilized };

std::string to_string(TraceKind k);
TraceKind trace_kind_from_string(const std::string& s);

struct TraceVector {
  std::vector<double> values;  // t_1..t_N (index 0 holds n = 1)
  TraceKind kind = TraceKind::raw_power;
  double alpha0 = 0.0;

  int size() const { return static_cast<int>(values.size()); }
};

void to_json(nlohmann::json& j, const TraceVector& t);
void from_json(const nlohmann::json& j, TraceVector& t);
/// JSON text with 15 significant digits per value.
std::string dump_trace_json(const TraceVector& t);

/// trace(M_n(a)), n = 1..n_max, from M_n = M_{n-1} M1(a) + M_{n-2} M1(1).
TraceVector mn_traces(const ModalMatrixSet& ms, int n_max);

/// T_n(z) = z (alpha0 z + 1)^{n-1} by repeated multiplication with (alpha0 z + 1).
cplx tn_scalar(cplx z, int n, double alpha0);

/// T_n(z) by the three-term form T_{n+1} = 2 T_n - T_{n-1} + alpha0^2 z^2 T_{n-1}.
/// The recurrence has the parasitic root 1 - alpha0 z, so the relative error
/// grows like |1 - alpha0 z|^n / |1 + alpha0 z|^n.
cplx tn_scalar_three_term(cplx z, int n, double alpha0);

/// trace(T_n(a)), n = 1..n_max, by the stabilised matrix recursion.
TraceVector tn_matrix_traces(const ModalMatrixSet& ms, double alpha0, int n_max);

/// Traces and their derivatives with respect to every cosine coefficient.
struct TraceSensitivity {
  TraceVector traces;
  Eigen::MatrixXd jacobian;  // n_max x M
};

TraceSensitivity tn_traces_with_jacobian(const ModalMatrixSet& ms, double alpha0, int n_max);

/// sum_j T_n(1/lambda_j) over measured pairs |j| <= k_meas, completed with
/// the asymptotic eigenvalues -alpha0/2 + j pi i for k_meas < |j| <= k_tail.
TraceVector spectral_traces(const Spectrum& s, double alpha0, int n_max, int k_meas, int k_tail);

/// Same sums with monomials z^n (no stabilisation). The n = 1 value is the
/// symmetric-pairing regularised sum.
TraceVector raw_power_traces(const Spectrum& s, int n_max, int k_meas, int k_tail, double alpha0);

}  // namespace spectrace
