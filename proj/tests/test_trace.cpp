#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "spectrace/forward.hpp"
#include "spectrace/quadrature.hpp"
#include "spectrace/trace.hpp"

using namespace spectrace;
using std::numbers::pi;

namespace {

// -(2 / (pi^2 j^2)) int sin(i pi x) sin(j pi x) cos(2 (m-1) pi x) dx by quadrature.
double m1_entry_by_quadrature(int m, int i, int j) {
  const double v = integrate(
      [=](double x) {
        return std::sin(i * pi * x) * std::sin(j * pi * x) * std::cos(2.0 * (m - 1) * pi * x);
      },
      256);
  return -2.0 / (pi * pi * j * j) * v;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("modal basis entries agree with direct quadrature") {
  const int J = 9;
  for (int m = 1; m <= 6; ++m) {
    const auto B = build_m1_basis(m, J);
    REQUIRE(B.rows() == J);
    for (int i = 1; i <= J; ++i)
      for (int j = 1; j <= J; ++j)
        CHECK(std::abs(B(i - 1, j - 1) - m1_entry_by_quadrature(m, i, j)) < 1e-14);
  }
}

TEST_CASE("M1(e_1) is the negative inverse Dirichlet spectrum") {
  const auto B = build_m1_basis(1, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(B(i, j) == doctest::Approx(i == j ? -1.0 / (pi * pi * (j + 1) * (j + 1)) : 0.0));
}

TEST_CASE("M1(e_2) at J = 3") {
  const auto B = build_m1_basis(2, 3);
  const double h = 1.0 / (2.0 * pi * pi);
  CHECK(B(0, 0) == doctest::Approx(h));
  CHECK(B(0, 2) == doctest::Approx(-h / 9.0));
  CHECK(B(2, 0) == doctest::Approx(-h));
  int nonzeros = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) nonzeros += std::abs(B(i, j)) > 1e-15;
  CHECK(nonzeros == 3);
  CHECK_FALSE(B.isApprox(B.transpose()));
}

TEST_CASE("modal set is linear in the coefficients") {
  const FourierDamping a({1.2, -0.4, 0.3, 0.1});
  const ModalMatrixSet ms(a, 20);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(20, 20);
  for (int m = 1; m <= 4; ++m) sum += a[m - 1] * ms.basis(m);
  CHECK((ms.m1_a() - sum).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(Eigen::MatrixXd(ms.m1_a_sparse()).isApprox(ms.m1_a()));
  CHECK(Eigen::MatrixXd(ms.basis_sparse(3)).isApprox(ms.basis(3)));
  CHECK(ms.m1_one().isApprox(build_m1_basis(1, 20)));
  CHECK(ms.warnings.empty());
  CHECK_FALSE(ModalMatrixSet(a, 2).warnings.empty());
  CHECK_THROWS(ModalMatrixSet(FourierDamping{}, 4));
}

TEST_CASE("constant damping: trace of M_n is a power sum over closed-form roots") {
  for (double c : {0.5, 2.0}) {
    const int J = 30;
    const ModalMatrixSet ms(FourierDamping::constant(c), J);
    const auto t = mn_traces(ms, 12);
    const auto s = constant_damping_spectrum(c, J);
    for (int n = 1; n <= 12; ++n) {
      cplx ref = 0.0;
      for (int j = 1; j <= J; ++j) ref += std::pow(s.at(j), -n) + std::pow(s.at(-j), -n);
      CHECK(t.values[n - 1] == doctest::Approx(ref.real()).epsilon(1e-12));
    }
  }
}

TEST_CASE("Basel sum from the first trace") {
  const ModalMatrixSet ms(FourierDamping::constant(1.0), 2000);
  // trace M1(1) = -sum 1/(pi^2 j^2) -> -1/6
  const auto t = mn_traces(ms, 2);
  CHECK(t.values[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-3));
  // trace M_2(1) = sum (1/j^4 pi^4 - 2/j^2 pi^2) -> 1/90 - 1/3
  CHECK(t.values[1] == doctest::Approx(1.0 / 90.0 - 1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("scalar polynomial: recursion forms agree with the closed form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  const double a0 = 1.3;
  for (int trial = 0; trial < 200; ++trial) {
    const double th = u(rng);
    const cplx z = cplx(-1.0 / a0, 0.0) + (1.0 / a0) * std::polar(1.0, th);
    const int n = 1 + trial % 150;
    const cplx closed = z * std::pow(a0 * z + 1.0, n - 1);
    CHECK(std::abs(tn_scalar(z, n, a0) - closed) <= 1e-12 * std::abs(closed) + 1e-300);
  }
  for (int n = 1; n <= 30; ++n) {
    const cplx z(0.01, 0.02);
    const cplx closed = z * std::pow(a0 * z + 1.0, n - 1);
    CHECK(std::abs(tn_scalar_three_term(z, n, a0) - closed) < 1e-12 * std::abs(closed));
  }
  CHECK_THROWS(tn_scalar(cplx(0.1, 0), 0, a0));
}

TEST_CASE("stabilised traces equal binomial combinations of M_n traces") {
  const FourierDamping a({1.1, 0.3, -0.2, 0.05});
  const ModalMatrixSet ms(a, 40);
  const double a0 = 1.1;
  const auto m = mn_traces(ms, 20);
  const auto t = tn_matrix_traces(ms, a0, 20);
  REQUIRE(t.kind == TraceKind::stabilized);
  CHECK(t.alpha0 == a0);
  for (int n = 1; n <= 20; ++n) {
    double ref = 0.0;
    for (int k = 0; k <= n - 1; ++k) ref += binom(n - 1, k) * std::pow(a0, k) * m.values[k];
    CHECK(std::abs(t.values[n - 1] - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("stabilised traces for constant damping equal spectral polynomial sums") {
  const double c = 1.0;
  const int J = 50;
  const ModalMatrixSet ms(FourierDamping::constant(c), J);
  const auto t = tn_matrix_traces(ms, c, 80);
  const auto s = constant_damping_spectrum(c, J);
  const auto r = spectral_traces(s, c, 80, J, J);
  for (int n = 1; n <= 80; ++n)
    CHECK(t.values[n - 1] == doctest::Approx(r.values[n - 1]).epsilon(1e-10));
}

TEST_CASE("tail completion for constant damping") {
  const double c = 1.0;
  const auto s = constant_damping_spectrum(c, 10);
  const auto r = spectral_traces(s, c, 40, 10, 200);
  const auto t = tn_matrix_traces(ModalMatrixSet(FourierDamping::constant(c), 200), c, 40);
  for (int n = 1; n <= 40; ++n)
    CHECK(std::abs(r.values[n - 1] - t.values[n - 1]) <= 1e-3 * std::abs(t.values[n - 1]));

  // empty tail range is the plain truncated sum
  const auto plain = spectral_traces(s, c, 5, 10, 10);
  for (int n = 1; n <= 5; ++n) {
    cplx ref = 0.0;
    for (int j = 1; j <= 10; ++j)
      ref += tn_scalar(1.0 / s.at(j), n, c) + tn_scalar(1.0 / s.at(-j), n, c);
    CHECK(plain.values[n - 1] == doctest::Approx(ref.real()).epsilon(1e-13));
  }
  CHECK_THROWS(spectral_traces(s, c, 5, 11, 20));
  CHECK_THROWS(spectral_traces(s, c, 5, 10, 9));
}

TEST_CASE("regularised first raw trace") {
  const double c = 1.0;
  const auto s = constant_damping_spectrum(c, 500);
  const auto r = raw_power_traces(s, 2, 500, 500, c);
  REQUIRE(r.kind == TraceKind::raw_power);
  CHECK(std::abs(r.values[0] + c / 6.0) < 1e-3);
}

TEST_CASE("broken conjugate symmetry is detected") {
  const std::vector<cplx> pos{{-0.5, 3.0}, {-0.5, 6.2}};
  const std::vector<cplx> neg{{-0.5, -3.0}, {-0.4, -6.0}};
  const auto s = make_spectrum(pos, neg);
  CHECK_THROWS_AS(spectral_traces(s, 1.0, 3, 2, 2), std::runtime_error);
}

TEST_CASE("analytic Jacobian matches central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int trial = 0; trial < 4; ++trial) {
    const int M = 2 + trial;
    std::vector<double> c(static_cast<std::size_t>(M));
    c[0] = 1.0 + u(rng);
    for (int m = 1; m < M; ++m) c[m] = u(rng);
    const FourierDamping a(c);
    const double a0 = c[0];
    const int N = 30, J = 40;
    const auto sens = tn_traces_with_jacobian(ModalMatrixSet(a, J), a0, N);
    REQUIRE(sens.jacobian.rows() == N);
    REQUIRE(sens.jacobian.cols() == M);
    const auto base = tn_matrix_traces(ModalMatrixSet(a, J), a0, N);
    for (int n = 0; n < N; ++n) CHECK(sens.traces.values[n] == doctest::Approx(base.values[n]));
    const double h = 1e-6;
    for (int m = 0; m < M; ++m) {
      auto cp = c, cm = c;
      cp[m] += h;
      cm[m] -= h;
      const auto tp = tn_matrix_traces(ModalMatrixSet(FourierDamping(cp), J), a0, N);
      const auto tm = tn_matrix_traces(ModalMatrixSet(FourierDamping(cm), J), a0, N);
      for (int n = 0; n < N; ++n) {
        const double fd = (tp.values[n] - tm.values[n]) / (2.0 * h);
        CHECK(std::abs(sens.jacobian(n, m) - fd) <= 1e-5 * std::max(1e-3, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("trace vector JSON round trip") {
  TraceVector t{{1.0 / 3.0, -2.5e-7, 4.0}, TraceKind::stabilized, 1.25};
  const auto j = nlohmann::json::parse(dump_trace_json(t));
  const auto back = j.get<TraceVector>();
  CHECK(back.kind == TraceKind::stabilized);
  CHECK(back.alpha0 == 1.25);
  REQUIRE(back.size() == 3);
  CHECK(back.values[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(trace_kind_from_string(to_string(TraceKind::raw_power)) == TraceKind::raw_power);
  CHECK_THROWS(trace_kind_from_string("power"));
}
