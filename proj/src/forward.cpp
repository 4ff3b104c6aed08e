#include "spectrace/forward.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace spectrace {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_real(cplx z) { return std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z)); }

}  // namespace

GridOperator build_grid_operator(int n_cheb) {
  if (n_cheb < 8) throw std::invalid_argument("build_grid_operator: n_cheb must be >= 8");
  const int n = n_cheb;

  // Chebyshev differentiation matrix on nodes t_i = -cos(pi i / n), ordered increasingly.
  Eigen::VectorXd t(n + 1), c(n + 1);
  for (int i = 0; i <= n; ++i) {
    t(i) = -std::cos(kPi * i / n);
    c(i) = ((i == 0 || i == n) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0);
  }
  Eigen::MatrixXd d(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    double row = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = (c(i) / c(j)) / (t(i) - t(j));
      row += d(i, j);
    }
    d(i, i) = -row;
  }

  // x = (t + 1) / 2, so d/dx = 2 d/dt and d^2/dx^2 = 4 d^2/dt^2.
  const Eigen::MatrixXd d2 = 4.0 * (d * d);

  GridOperator g;
  g.n_cheb = n;
  g.d2_interior = d2.block(1, 1, n - 1, n - 1);
  g.grid_x = 0.5 * (t.segment(1, n - 1).array() + 1.0);
  return g;
}

Eigen::MatrixXd assemble_companion(const GridOperator& g, std::span<const double> alpha_vals) {
  const int n = g.interior_size();
  if (static_cast<int>(alpha_vals.size()) != n)
    throw std::invalid_argument("assemble_companion: alpha_vals has " +
                                std::to_string(alpha_vals.size()) + " entries, grid has " +
                                std::to_string(n));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.block(0, n, n, n).setIdentity();
  a.block(n, 0, n, n) = g.d2_interior;
  for (int i = 0; i < n; ++i) a(n + i, n + i) = -alpha_vals[i];
  return a;
}

cplx Spectrum::at(int label) const {
  const int k = pair_count();
  if (label == 0 || std::abs(label) > k)
    throw std::out_of_range("Spectrum::at: label " + std::to_string(label) + " outside +-1.." +
                            std::to_string(k));
  return eigs[static_cast<std::size_t>(label < 0 ? k + label : k + label - 1)];
}

Spectrum Spectrum::truncated(int k) const {
  const int have = pair_count();
  if (k > have) throw std::invalid_argument("Spectrum::truncated: not enough pairs");
  std::vector<cplx> pos, neg;
  for (int j = 1; j <= k; ++j) {
    pos.push_back(at(j));
    neg.push_back(at(-j));
  }
  Spectrum out = make_spectrum(pos, neg);
  out.alpha0_hint = alpha0_hint;
  out.warnings = warnings;
  return out;
}

Spectrum make_spectrum(std::span<const cplx> positive, std::span<const cplx> negative) {
  if (positive.size() != negative.size())
    throw std::invalid_argument("make_spectrum: unequal number of +j and -j eigenvalues");
  const int k = static_cast<int>(positive.size());
  Spectrum s;
  s.eigs.reserve(2 * k);
  s.labels.reserve(2 * k);
  for (int j = k; j >= 1; --j) {
    s.eigs.push_back(negative[j - 1]);
    s.labels.push_back(-j);
  }
  for (int j = 1; j <= k; ++j) {
    s.eigs.push_back(positive[j - 1]);
    s.labels.push_back(j);
  }
  return s;
}

SpectrumFilter make_filter(int n_cheb, double alpha_min, double alpha_max) {
  const double a = 0.5 * alpha_min, b = 0.5 * alpha_max;
  const double slack = 1e-6 * (1.0 + std::abs(b));
  SpectrumFilter f;
  f.max_imag = kPi * n_cheb / 4.0;
  f.re_lo = -b - 0.1 * std::abs(b) - slack;
  f.re_hi = -a + 0.1 * std::abs(a) + slack;
  const double spread = b > kPi ? std::sqrt(b * b - kPi * kPi) : 0.0;
  f.real_lo = std::min(f.re_lo, -b - spread - 0.1 * (b + spread) - slack);
  f.real_hi = std::max(f.re_hi, -a + spread + 0.1 * spread + slack);
  return f;
}

Spectrum compute_spectrum(const Eigen::MatrixXd& companion, int k, const SpectrumFilter& filter) {
  if (companion.rows() != companion.cols() || companion.rows() % 2 != 0)
    throw std::invalid_argument("compute_spectrum: companion must be square of even size");
  const int half = static_cast<int>(companion.rows() / 2);
  if (k > half) throw std::invalid_argument("compute_spectrum: k exceeds n_cheb - 1");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("compute_spectrum: eigensolver did not converge");

  std::vector<cplx> upper, lower, reals;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    cplx z = solver.eigenvalues()(i);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
    if (std::abs(z.imag()) > filter.max_imag) continue;
    if (is_real(z)) {
      if (z.real() >= filter.real_lo && z.real() <= filter.real_hi) reals.emplace_back(z.real(), 0.0);
      continue;
    }
    if (z.real() < filter.re_lo || z.real() > filter.re_hi) continue;
    (z.imag() > 0 ? upper : lower).push_back(z);
  }

  Spectrum s;
  auto by_imag = [](cplx a, cplx b) {
    return a.imag() < b.imag() || (a.imag() == b.imag() && a.real() < b.real());
  };
  std::sort(upper.begin(), upper.end(), by_imag);
  std::sort(lower.begin(), lower.end(), by_imag);
  std::reverse(lower.begin(), lower.end());  // closest to the real axis first
  std::sort(reals.begin(), reals.end(), [](cplx a, cplx b) { return a.real() < b.real(); });

  if (upper.size() != lower.size()) {
    const std::size_t n = std::min(upper.size(), lower.size());
    s.warnings.push_back("unpaired non-real eigenvalues after filtering; kept " +
                         std::to_string(n) + " pairs");
    upper.resize(n);
    lower.resize(n);
  }
  if (reals.size() % 2 != 0) {
    // drop the real eigenvalue farthest from the centre of the real cluster
    const double centre = 0.5 * (reals.front().real() + reals.back().real());
    auto far = std::max_element(reals.begin(), reals.end(), [&](cplx a, cplx b) {
      return std::abs(a.real() - centre) < std::abs(b.real() - centre);
    });
    reals.erase(far);
    s.warnings.push_back("odd number of real eigenvalues; dropped one outlier");
  }

  // Real eigenvalues come first, paired from the outside in: lambda_{-j} is
  // the j-th smallest and lambda_j the j-th largest. This matches the
  // constant-damping labelling, where mode j = 1 has the widest split.
  std::vector<cplx> pos, neg;
  const std::size_t r = reals.size() / 2;
  if (r > 0)
    s.warnings.push_back(std::to_string(2 * r) +
                         " real eigenvalues present; labels for them follow the outside-in convention");
  for (std::size_t j = 0; j < r; ++j) {
    neg.push_back(reals[j]);
    pos.push_back(reals[reals.size() - 1 - j]);
  }
  for (std::size_t j = 0; j < upper.size(); ++j) {
    pos.push_back(upper[j]);
    neg.push_back(lower[j]);
  }

  const int available = static_cast<int>(pos.size());
  if (k <= 0) k = available;
  if (available < k)
    throw std::runtime_error("compute_spectrum: only " + std::to_string(available) +
                             " trustworthy pairs, requested " + std::to_string(k));
  pos.resize(static_cast<std::size_t>(k));
  neg.resize(static_cast<std::size_t>(k));

  Spectrum out = make_spectrum(pos, neg);
  out.warnings = std::move(s.warnings);
  return out;
}

Spectrum forward_spectrum(const GridOperator& g, std::span<const double> alpha_vals, int k) {
  const auto [lo, hi] = std::minmax_element(alpha_vals.begin(), alpha_vals.end());
  if (lo == alpha_vals.end()) throw std::invalid_argument("forward_spectrum: empty damping");
  if (*lo < 0.0) throw std::invalid_argument("forward_spectrum: damping must be nonnegative");
  const SpectrumFilter filter = make_filter(g.n_cheb, *lo, *hi);
  Spectrum s = compute_spectrum(assemble_companion(g, alpha_vals), k, filter);
  if (!check_weak_damping(0.5 * *hi))
    s.warnings.push_back("sup(alpha)/2 >= pi: real eigenvalues are possible");
  return s;
}

Spectrum constant_damping_spectrum(double c, int k) {
  if (k < 1) throw std::invalid_argument("constant_damping_spectrum: need k >= 1");
  std::vector<cplx> pos, neg;
  for (int j = 1; j <= k; ++j) {
    const double mu = j * j * kPi * kPi;
    const double disc = c * c - 4.0 * mu;
    if (disc < 0.0) {
      const double im = 0.5 * std::sqrt(-disc);
      pos.emplace_back(-0.5 * c, im);
      neg.emplace_back(-0.5 * c, -im);
    } else {
      const double sq = std::sqrt(disc);
      pos.emplace_back(0.5 * (-c + sq), 0.0);
      neg.emplace_back(0.5 * (-c - sq), 0.0);
    }
  }
  Spectrum s = make_spectrum(pos, neg);
  s.alpha0_hint = c;
  return s;
}

bool check_weak_damping(double b) { return b < kPi; }

Spectrum add_noise(const Spectrum& s, const NoiseModel& nm) {
  if (nm.delta < 0.0) throw std::invalid_argument("add_noise: delta must be >= 0");
  if (nm.delta == 0.0) return s;
  std::mt19937_64 rng(nm.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int k = s.pair_count();
  std::vector<cplx> pos, neg;
  for (int j = 1; j <= k; ++j) {
    double u = 0.0;
    while (u == 0.0) u = unif(rng);  // open interval (0,1)
    const cplx lp = s.at(j), ln = s.at(-j);
    if (is_real(lp) && is_real(ln)) {
      // A real pair has no conjugate partner to mirror into; shift both
      // along the real axis so the data stay real.
      pos.push_back(lp + nm.delta * u);
      neg.push_back(ln + nm.delta * u);
    } else {
      const cplx eps = nm.delta * u * cplx(1.0, 1.0);
      pos.push_back(lp + eps);
      neg.push_back(ln + std::conj(eps));
    }
  }
  Spectrum out = make_spectrum(pos, neg);
  out.alpha0_hint = s.alpha0_hint;
  out.warnings = s.warnings;
  return out;
}

SpectrumCheck check_spectrum(const Spectrum& s, double re_lo, double re_hi, double conj_tol,
                             double strip_tol) {
  SpectrumCheck c;
  for (int j = 1; j <= s.pair_count(); ++j) {
    const cplx lp = s.at(j), ln = s.at(-j);
    if (!(is_real(lp) && is_real(ln)))
      c.max_conjugate_error =
          std::max(c.max_conjugate_error, std::abs(std::conj(lp) - ln) / std::abs(lp));
    for (cplx z : {lp, ln}) {
      if (is_real(z)) continue;
      const double v = std::max({0.0, re_lo - z.real(), z.real() - re_hi});
      c.max_strip_violation = std::max(c.max_strip_violation, v);
    }
  }
  c.ok = c.max_conjugate_error <= conj_tol && c.max_strip_violation <= strip_tol;
  return c;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "label,re,im\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(15);
  for (std::size_t i = 0; i < s.eigs.size(); ++i)
    os << s.labels[i] << ',' << s.eigs[i].real() << ',' << s.eigs[i].imag() << '\n';
  os.flags(flags);
  os.precision(prec);
}

Spectrum read_spectrum_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_spectrum_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "label,re,im") throw std::runtime_error("read_spectrum_csv: bad header '" + line + "'");

  std::vector<std::pair<int, cplx>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    int label = 0;
    double re = 0.0, im = 0.0;
    char c1 = 0, c2 = 0;
    if (!(ss >> label >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      throw std::runtime_error("read_spectrum_csv: malformed row at line " + std::to_string(lineno));
    rows.emplace_back(label, cplx(re, im));
  }
  const int k = static_cast<int>(rows.size() / 2);
  if (rows.size() % 2 != 0) throw std::runtime_error("read_spectrum_csv: odd number of rows");
  std::vector<cplx> pos(static_cast<std::size_t>(k)), neg(static_cast<std::size_t>(k));
  std::vector<char> seen(static_cast<std::size_t>(2 * k), 0);
  for (const auto& [label, z] : rows) {
    if (label == 0 || std::abs(label) > k)
      throw std::runtime_error("read_spectrum_csv: label " + std::to_string(label) + " out of range");
    const std::size_t slot = static_cast<std::size_t>(label > 0 ? k + label - 1 : k + label);
    if (seen[slot]) throw std::runtime_error("read_spectrum_csv: duplicate label " + std::to_string(label));
    seen[slot] = 1;
    (label > 0 ? pos : neg)[static_cast<std::size_t>(std::abs(label) - 1)] = z;
  }
  return make_spectrum(pos, neg);
}

}  // namespace spectrace
