#pragma once

#include <functional>
#include <span>
#include <vector>

namespace spectrace {

/// Even damping coefficient stored as a truncated cosine series
///   alpha_M(x) = sum_{m=1}^{M} a_m cos(2 (m-1) pi x).
/// a_1 is the mean value of alpha over [0,1].
class FourierDamping {
 public:
  FourierDamping() = default;
  explicit FourierDamping(std::vector<double> coeffs);

  static FourierDamping constant(double c) { return FourierDamping({c}); }
  static FourierDamping zeros(int m);

  /// Cosine-series projection of an arbitrary profile onto m modes.
  /// Quadrature is split at `breakpoints` for piecewise profiles.
  static FourierDamping project(const std::function<double(double)>& alpha, int m,
                                std::span<const double> breakpoints = {},
                                int quad_nodes = 2048);

  double operator()(double x) const;
  std::vector<double> sample(std::span<const double> xs) const;

  int size() const { return static_cast<int>(coeffs_.size()); }
  bool empty() const { return coeffs_.empty(); }
  double mean() const { return coeffs_.empty() ? 0.0 : coeffs_.front(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double operator[](int m) const { return coeffs_[static_cast<std::size_t>(m)]; }

  /// Zero-padded or truncated copy with exactly m modes.
  FourierDamping resized(int m) const;

  friend FourierDamping operator+(const FourierDamping& a, const FourierDamping& b);
  friend FourierDamping operator-(const FourierDamping& a, const FourierDamping& b);
  friend FourierDamping operator*(double s, const FourierDamping& a);
  friend bool operator==(const FourierDamping&, const FourierDamping&) = default;

 private:
  std::vector<double> coeffs_;
};

}  // namespace spectrace
