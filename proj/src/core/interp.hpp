#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/types.hpp"

namespace mq {

// Index of the interval [x_i, x_{i+1}] containing x (clamped to the range).
inline std::size_t bracket_index(const std::vector<double>& x, double v) {
  if (v <= x.front()) return 0;
  if (v >= x.back()) return x.size() - 2;
  auto it = std::upper_bound(x.begin(), x.end(), v);
  return static_cast<std::size_t>(it - x.begin()) - 1;
}

// 4-point Lagrange interpolation on a nonuniform grid; falls back to the
// available points near the ends.
inline double cubic_interp(const std::vector<double>& x,
                           const std::vector<double>& y, double v) {
  const std::size_t m = x.size();
  if (m != y.size() || m < 2) throw std::invalid_argument("cubic_interp: bad sizes");
  if (m < 4) {
    const std::size_t i = bracket_index(x, v);
    const double t = (v - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - t) * y[i] + t * y[i + 1];
  }
  std::size_t i = bracket_index(x, v);
  std::size_t lo = (i == 0) ? 0 : i - 1;
  if (lo + 3 >= m) lo = m - 4;
  double out = 0.0;
  for (std::size_t a = lo; a < lo + 4; ++a) {
    double L = 1.0;
    for (std::size_t b = lo; b < lo + 4; ++b)
      if (b != a) L *= (v - x[b]) / (x[a] - x[b]);
    out += L * y[a];
  }
  return out;
}

// Radial field evaluated at |r|; even extension about the origin.
inline double eval_radial(const Field& f, double r) {
  return cubic_interp(f.grid->nodes, f.values, std::fabs(r));
}

inline double linear_interp(double x0, double y0, double x1, double y1,
                            double x) {
  if (x1 == x0) return y0;
  const double t = (x - x0) / (x1 - x0);
  return (1.0 - t) * y0 + t * y1;
}

}  // namespace mq
