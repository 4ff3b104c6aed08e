#include "spectrace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spectrace {

QuadratureRule clenshaw_curtis(int n) {
  if (n < 1) throw std::invalid_argument("clenshaw_curtis: need n >= 1");
  const double pi = std::numbers::pi;
  std::vector<double> x(n + 1), w(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) x[k] = std::cos(pi * k / n);

  // Interior weights built from the cosine sums of the classical construction.
  std::vector<double> v(n + 1, 1.0);
  const double nn = static_cast<double>(n) * n;
  if (n % 2 == 0) {
    w[0] = w[n] = 1.0 / (nn - 1.0);
    for (int k = 1; k < n / 2; ++k)
      for (int i = 1; i < n; ++i) v[i] -= 2.0 * std::cos(2.0 * k * pi * i / n) / (4.0 * k * k - 1.0);
    for (int i = 1; i < n; ++i) v[i] -= std::cos(pi * i) / (nn - 1.0);
  } else {
    w[0] = w[n] = 1.0 / nn;
    for (int k = 1; k <= (n - 1) / 2; ++k)
      for (int i = 1; i < n; ++i) v[i] -= 2.0 * std::cos(2.0 * k * pi * i / n) / (4.0 * k * k - 1.0);
  }
  for (int i = 1; i < n; ++i) w[i] = 2.0 * v[i] / n;

  QuadratureRule rule;
  rule.nodes.resize(n + 1);
  rule.weights.resize(n + 1);
  // map [-1,1] -> [0,1], reversed so nodes increase
  for (int k = 0; k <= n; ++k) {
    rule.nodes[k] = 0.5 * (1.0 - x[k]);
    rule.weights[k] = 0.5 * w[k];
  }
  return rule;
}

double integrate(const std::function<double(double)>& f, int n, std::span<const double> breakpoints) {
  std::vector<double> edges{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < 1.0) edges.push_back(b);
  edges.push_back(1.0);
  std::sort(edges.begin(), edges.end());

  const QuadratureRule rule = clenshaw_curtis(n);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p], h = edges[p + 1] - edges[p];
    if (h <= 0.0) continue;
    double panel = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      // keep endpoint evaluations strictly inside the panel so that the
      // one-sided limit of a piecewise profile is used
      double x = lo + h * rule.nodes[k];
      if (k == 0) x = std::nextafter(lo, lo + h);
      if (k + 1 == rule.nodes.size()) x = std::nextafter(lo + h, lo);
      panel += rule.weights[k] * f(x);
    }
    total += h * panel;
  }
  return total;
}

}  // namespace spectrace
