#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spectrace {

using cplx = std::complex<double>;

/// Chebyshev collocation of d^2/dx^2 on [0,1] with homogeneous Dirichlet
/// conditions. Only the n_cheb - 1 interior nodes carry unknowns.
struct GridOperator {
  int n_cheb = 0;
  Eigen::MatrixXd d2_interior;
  Eigen::VectorXd grid_x;  // increasing, inside (0,1)

  int interior_size() const { return static_cast<int>(grid_x.size()); }
};

GridOperator build_grid_operator(int n_cheb);

/// Block matrix [[0, I], [D2, -diag(alpha)]] of the damped wave operator.
Eigen::MatrixXd assemble_companion(const GridOperator& g, std::span<const double> alpha_vals);

/// Labelled point spectrum. Eigenvalues are stored in label order
/// -k, ..., -1, 1, ..., k, which is also ascending imaginary part for
/// non-real eigenvalues.
struct Spectrum {
  std::vector<cplx> eigs;
  std::vector<int> labels;
  std::optional<double> alpha0_hint;
  std::vector<std::string> warnings;

  int pair_count() const { return static_cast<int>(eigs.size() / 2); }
  /// Eigenvalue with signed label j, 1 <= |j| <= pair_count().
  cplx at(int label) const;
  /// Keeps the pairs with |label| <= k.
  Spectrum truncated(int k) const;
};

/// Builds a Spectrum from pairs (lambda_j, lambda_{-j}), j = 1..k.
Spectrum make_spectrum(std::span<const cplx> positive, std::span<const cplx> negative);

/// Acceptance window for eigenvalues of the collocated operator. Anything
/// outside is treated as a discretisation artefact.
struct SpectrumFilter {
  double max_imag = 0.0;
  double re_lo = 0.0;
  double re_hi = 0.0;
  // Real eigenvalues may sit outside the strip when the damping is large.
  double real_lo = 0.0;
  double real_hi = 0.0;
};

/// Strip of the damped wave spectrum for 2a <= alpha <= 2b, widened by 10%,
/// and |Im| limited to the lower quarter of the collocation spectrum.
SpectrumFilter make_filter(int n_cheb, double alpha_min, double alpha_max);

Spectrum compute_spectrum(const Eigen::MatrixXd& companion, int k, const SpectrumFilter& filter);

/// Convenience: discretise, solve, filter. k <= 0 keeps every trustworthy pair.
Spectrum forward_spectrum(const GridOperator& g, std::span<const double> alpha_vals, int k = 0);

/// Roots of lambda^2 + c lambda + j^2 pi^2 = 0, j = 1..k.
Spectrum constant_damping_spectrum(double c, int k);

/// True when b < pi, i.e. the damping 2b cannot produce real eigenvalues.
bool check_weak_damping(double b);

struct NoiseModel {
  double delta = 0.0;
  std::uint64_t seed = 0;
};

/// lambda_j + delta * u_j * (1 + i) for j >= 1 with u_j ~ U(0,1); the
/// partner lambda_{-j} receives the conjugate perturbation.
Spectrum add_noise(const Spectrum& s, const NoiseModel& nm);

struct SpectrumCheck {
  double max_conjugate_error = 0.0;  // max |conj(l_j) - l_{-j}| / |l_j| over non-real pairs
  double max_strip_violation = 0.0;  // distance of Re(l) outside [re_lo, re_hi]
  bool ok = false;
};

SpectrumCheck check_spectrum(const Spectrum& s, double re_lo, double re_hi,
                             double conj_tol = 1e-8, double strip_tol = 1e-6);

/// CSV with header `label,re,im`, 15 significant digits.
void write_spectrum_csv(std::ostream& os, const Spectrum& s);
Spectrum read_spectrum_csv(std::istream& is);

}  // namespace spectrace
