#pragma once

#include <cmath>

namespace mq {

// Smooth bump: 1 on [0,1], 0 on [2,inf), exp(1 - 1/(1-(x-1)^2)) between.
inline double chi0(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double u = x - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

inline double chi0_prime(double x) {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  const double u = x - 1.0;
  const double d = 1.0 - u * u;
  return -2.0 * u / (d * d) * chi0(x);
}

inline double chi0_second(double x) {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  const double u = x - 1.0;
  const double d = 1.0 - u * u;
  const double gp = -2.0 * u / (d * d);
  const double gpp = -2.0 * (1.0 + 3.0 * u * u) / (d * d * d);
  return (gpp + gp * gp) * chi0(x);
}

// Quintic smoothstep: 0 at a, 1 at b, C^2 at both ends.
inline double smoothstep5(double x, double a, double b) {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  const double t = (x - a) / (b - a);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace mq
