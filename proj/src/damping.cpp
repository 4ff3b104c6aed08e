#include "spectrace/damping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spectrace/quadrature.hpp"

namespace spectrace {

FourierDamping::FourierDamping(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

FourierDamping FourierDamping::zeros(int m) {
  if (m < 0) throw std::invalid_argument("FourierDamping::zeros: negative size");
  return FourierDamping(std::vector<double>(static_cast<std::size_t>(m), 0.0));
}

FourierDamping FourierDamping::project(const std::function<double(double)>& alpha, int m,
                                       std::span<const double> breakpoints, int quad_nodes) {
  if (m < 1) throw std::invalid_argument("FourierDamping::project: need m >= 1");
  std::vector<double> c(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double freq = 2.0 * k * std::numbers::pi;
    const double scale = k == 0 ? 1.0 : 2.0;
    c[k] = scale * integrate([&](double x) { return alpha(x) * std::cos(freq * x); }, quad_nodes,
                             breakpoints);
  }
  return FourierDamping(std::move(c));
}

// Evaluated in the distance to the midpoint, cos(2 m pi x) = (-1)^m cos(2 m pi |x - 1/2|),
// so that x and 1 - x give bit-identical values.
double FourierDamping::operator()(double x) const {
  const double t = std::abs(x - 0.5);
  double s = 0.0;
  for (std::size_t m = 0; m < coeffs_.size(); ++m) {
    const double c = std::cos(2.0 * static_cast<double>(m) * std::numbers::pi * t);
    s += (m % 2 == 0 ? c : -c) * coeffs_[m];
  }
  return s;
}

std::vector<double> FourierDamping::sample(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return (*this)(x); });
  return out;
}

FourierDamping FourierDamping::resized(int m) const {
  std::vector<double> c(static_cast<std::size_t>(std::max(m, 0)), 0.0);
  std::copy_n(coeffs_.begin(), std::min(c.size(), coeffs_.size()), c.begin());
  return FourierDamping(std::move(c));
}

FourierDamping operator+(const FourierDamping& a, const FourierDamping& b) {
  const int m = std::max(a.size(), b.size());
  auto out = a.resized(m).coeffs_;
  for (int k = 0; k < b.size(); ++k) out[k] += b.coeffs_[k];
  return FourierDamping(std::move(out));
}

FourierDamping operator-(const FourierDamping& a, const FourierDamping& b) {
  return a + (-1.0) * b;
}

FourierDamping operator*(double s, const FourierDamping& a) {
  auto out = a.coeffs_;
  for (double& c : out) c *= s;
  return FourierDamping(std::move(out));
}

}  // namespace spectrace
