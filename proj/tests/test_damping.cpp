#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "spectrace/damping.hpp"
#include "spectrace/inversion.hpp"
#include "spectrace/quadrature.hpp"

using namespace spectrace;
using std::numbers::pi;

TEST_CASE("clenshaw-curtis weights sum to one and nodes are increasing") {
  for (int n : {1, 2, 7, 64}) {
    const auto q = clenshaw_curtis(n);
    REQUIRE(q.nodes.size() == static_cast<std::size_t>(n + 1));
    double s = 0.0;
    for (double w : q.weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < q.nodes.size(); ++i) CHECK(q.nodes[i] > q.nodes[i - 1]);
    CHECK(q.nodes.front() == doctest::Approx(0.0));
    CHECK(q.nodes.back() == doctest::Approx(1.0));
  }
}

TEST_CASE("clenshaw-curtis is exact on polynomials up to degree n") {
  for (int deg = 0; deg <= 8; ++deg) {
    const double v = integrate([deg](double x) { return std::pow(x, deg); }, 8);
    CHECK(v == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-14));
  }
  CHECK(integrate([](double x) { return std::exp(x); }, 32) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("breakpoints restore accuracy for a step") {
  auto step = [](double x) { return x > 0.3 && x < 0.7 ? 3.0 : 2.0; };
  const std::vector<double> bp{0.3, 0.7};
  CHECK(integrate(step, 16, bp) == doctest::Approx(2.4).epsilon(1e-13));
}

TEST_CASE("cosine series evaluation and symmetry") {
  const FourierDamping a({1.5, 0.2, 0.1, -0.04, 0.03});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    double ref = 0.0;
    for (int m = 0; m < a.size(); ++m) ref += a[m] * std::cos(2.0 * m * pi * x);
    CHECK(a(x) == doctest::Approx(ref).epsilon(1e-14));
  }
  // 1 - x is exact for x in [1/2, 1], so the symmetry must hold bit for bit
  for (int i = 0; i < 100; ++i) {
    const double x = 0.5 + 0.5 * u(rng);
    CHECK(a(x) == a(1.0 - x));
  }
  CHECK(a.mean() == 1.5);
  const std::vector<double> xs{0.0, 0.25, 0.5};
  const auto ys = a.sample(xs);
  REQUIRE(ys.size() == 3);
  CHECK(ys[1] == doctest::Approx(a(0.25)));
}

TEST_CASE("projection recovers a finite cosine series") {
  const FourierDamping a({1.0, -0.3, 0.25, 0.05});
  const auto p = FourierDamping::project([&](double x) { return a(x); }, 6);
  REQUIRE(p.size() == 6);
  for (int m = 0; m < 4; ++m) CHECK(p[m] == doctest::Approx(a[m]).epsilon(1e-12));
  CHECK(std::abs(p[4]) < 1e-12);
  CHECK(std::abs(p[5]) < 1e-12);
}

TEST_CASE("projection of a step matches its analytic coefficients") {
  // alpha = 2 + chi_(0.3,0.7): a_m = 2 int chi cos(2(m-1) pi x) for m >= 2
  auto step = [](double x) { return x > 0.3 && x < 0.7 ? 3.0 : 2.0; };
  const std::vector<double> bp{0.3, 0.7};
  const auto p = FourierDamping::project(step, 4, bp);
  CHECK(p[0] == doctest::Approx(2.4).epsilon(1e-12));
  for (int m = 1; m < 4; ++m) {
    const double k = 2.0 * m * pi;
    const double exact = 2.0 * (std::sin(k * 0.7) - std::sin(k * 0.3)) / k;
    CHECK(p[m] == doctest::Approx(exact).epsilon(1e-11));
  }
}

TEST_CASE("arithmetic, resizing and equality") {
  const FourierDamping a({1.0, 2.0});
  const FourierDamping b({0.5, 0.0, 1.0});
  const auto s = a + b;
  CHECK(s == FourierDamping({1.5, 2.0, 1.0}));
  CHECK((b - a) == FourierDamping({-0.5, -2.0, 1.0}));
  CHECK((2.0 * a) == FourierDamping({2.0, 4.0}));
  CHECK(a.resized(4) == FourierDamping({1.0, 2.0, 0.0, 0.0}));
  CHECK(b.resized(1) == FourierDamping::constant(0.5));
  CHECK(FourierDamping::zeros(3) == FourierDamping({0.0, 0.0, 0.0}));
  CHECK(FourierDamping{}.empty());
}

TEST_CASE("squared L2 distance: Parseval against quadrature") {
  const FourierDamping truth({1.5, 0.2, 0.1, -0.04, 0.03});
  const FourierDamping rec({1.45, 0.25, 0.0});
  const double parseval = l2_error(rec, truth);
  const double quad = l2_error(rec, [&](double x) { return truth(x); });
  CHECK(parseval == doctest::Approx(quad).epsilon(1e-12));
  CHECK(l2_error(FourierDamping::zeros(1), FourierDamping({1.0, 1.0})) ==
        doctest::Approx(1.5));
}
