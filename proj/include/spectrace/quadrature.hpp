#pragma once

#include <functional>
#include <span>
#include <vector>

namespace spectrace {

/// Clenshaw-Curtis rule on [0,1] with n+1 nodes (n >= 1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule clenshaw_curtis(int n);

/// Integrates f over [0,1], splitting at interior breakpoints so that
/// piecewise-smooth integrands keep spectral accuracy on each panel.
double integrate(const std::function<double(double)>& f, int n,
                 std::span<const double> breakpoints = {});

}  // namespace spectrace
