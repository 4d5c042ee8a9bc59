#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fsda {

using Vector = std::vector<double>;

// Small BLAS-1 helpers over spans. Sizes are the caller's responsibility.

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

inline bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace fsda
