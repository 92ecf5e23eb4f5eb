#pragma once

#include <string>
#include <vector>

#include "core/types.hpp"

namespace mq {

// omega_{n-1} * int_0^R f(r) r^{n-1} dr, trapezoid rule on the grid.
double integrate_radial(const Field& f, const ModelParams& mp);

// Unique positive root of theta^3 = (A + B theta)^2 for A >= 1, B >= 0.
// Returns the re-derived closed form after cross-checking it against a
// bracketed bisection/Newton iteration; the iteration is the ground truth.
double solve_theta_cubic(double A, double B);
// Iterative root alone (exposed for the equivalence tests).
double solve_theta_cubic_bracketed(double A, double B);
double theta_cubic_residual(double theta, double A, double B);

// theta for a given mass mu = int U: A = 1 + gamma |Omega|,
// B = gamma * mu / lambda^{1/(p+1)}.
double theta_of_mu(double mu, const ModelParams& mp);

// alpha(t) = lambda (1 + gamma int (1-u)^{-1})^{-q}; requires u in [0,1).
double alpha_of_u(const Field& u, const ModelParams& mp);

// Time series of the nonlocal state.
struct ThetaSample {
  double t = 0.0;
  double mu = 0.0;
  double theta = 1.0;
  double theta_prime = std::numeric_limits<double>::quiet_NaN();  // NaN = absent

  bool has_prime() const { return theta_prime == theta_prime; }
};

struct ThetaTrace {
  std::vector<ThetaSample> samples;

  void push(double t, double mu, double theta);
  void validate() const;  // increasing t, theta >= 1, mu >= 0
  // theta'(s)/theta in similarity time at t, by local finite differences
  double theta_ratio_s(double t, double T) const;
  std::string to_csv() const;  // header t,mu,theta,theta_prime
};

// Centered finite differences of theta over t (one-sided at the ends).
ThetaTrace finite_diff_theta_prime(const ThetaTrace& trace);

}  // namespace mq
