#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "core/types.hpp"
#include "solver/solver.hpp"
#include "spectral/spectral.hpp"

namespace mq {

// Parameters of the shrinking-set machinery.
struct ShrinkParams {
  double T = 0.05;      // design quench horizon, in (0, e^{-2})
  double K0 = 10.0;
  double eps0 = 0.025;  // defaults to min(R/8, 1/(2 M0))
  double alpha0 = 0.05;
  double A = 30.0;
  double delta0 = 0.0;  // defaults to u_hat(0)/2
  double C0 = 50.0;
  double eta0 = 0.1;
  double M0 = 20.0;

  void validate() const;  // T < e^{-2}, delta0 <= u_hat(0)/2, positivity
};

ShrinkParams shrink_defaults(double T, const ModelParams& mp);

struct InitialDataParams {
  double d0 = 0.0;
  std::array<double, 3> d1{0.0, 0.0, 0.0};

  void validate(int n) const;  // |d0|, |d1_i| <= 2
};

// K0 sqrt((T-t) |ln(T-t)|), the singular-region radius.
double p1_radius(double t, const ShrinkParams& sp);

// Inverse of |x| = (K0/4) sqrt(tau |ln tau|) over tau in (0, T]:
// returns (t_x, rho_x) with rho_x = T - t_x; residual <= 1e-12 |x|.
std::pair<double, double> t_of_x(double absx, const ShrinkParams& sp);

// Flat intermediate-region profile
// ((p+1)(1-tau) + (p+1)^2/(4p) K0^2/16)^{-1/(p+1)}; solves u' = u^{p+2}.
double u_hat(double tau, const ShrinkParams& sp, const ModelParams& mp);

// rho(x)^{1/(p+1)} U(x + xi sqrt(rho(x)), rho(x) tau + t(x)) with U rebuilt
// from the stored u snapshots (cubic in r, linear in t).
double rescaled_U(const SolutionTrace& trace, double x, double xi, double tau,
                  const ShrinkParams& sp, const ModelParams& mp);

// Membership report for one time slice.
struct RegionReport {
  // singular region: the six component norms against their bounds
  bool p1_pass = true;
  std::array<double, 6> p1_values{};
  std::array<double, 6> p1_bounds{};
  // intermediate region (vacuously true when the lattice is empty)
  bool p2_pass = true;
  bool p2_vacuous = false;
  double p2_sup_dev = 0.0;      // max |U_resc - u_hat|
  double p2_grad_margin = 1e300;  // min (bound - |grad|)
  // regular region
  bool p3_pass = true;
  double p3_sup_dev = 0.0;   // max |U(x,t) - U(x,0)|
  double p3_grad_dev = 0.0;  // max |grad U(x,t) - grad U(x,0)|
  double min_margin = 1e300;  // min over all normalized margins 1 - val/bound

  bool pass() const { return p1_pass && p2_pass && p3_pass; }
};

RegionReport check_membership(const SolutionTrace& trace, double t,
                              double T_hat, const ShrinkParams& sp,
                              const SpectralComponents& comps,
                              const HermiteBasis& basis,
                              const ModelParams& mp);

// Far-field initial profile: the final-profile cusp
// [(p+1)^2/(8p) |x|^2 / |ln|x||]^{-1/(p+1)} for small |x|, blended to zero
// before |x| = R/2 and capped by the cusp expression everywhere.
Field build_H_star(const RadialGrid& grid, const ModelParams& mp);
double H_star_value(double r, const ModelParams& mp);

// Constructed initial data for the rescaled variable: profile plus tunable
// (d0 + d1.z) bump near the origin, matched to H* outside, tapered to zero
// at the boundary.  x may be signed along the first axis (n = 1) or a
// point in R^n; the Field version samples the nonnegative radial slice.
double initial_U_value(const std::array<double, 3>& x,
                       const InitialDataParams& d, const ShrinkParams& sp,
                       const ModelParams& mp);
Field build_initial_U(const RadialGrid& grid, const InitialDataParams& d,
                      const ShrinkParams& sp, const ModelParams& mp);

// theta(0) from the fixed point theta = (1+gamma|O| + gamma theta mu /
// lambda^{1/(p+1)})^{2/3} with mu = int U0.
double theta0_fixed_point(const Field& U0, const ModelParams& mp);

// u(x,0) = ubar/(ubar+1), ubar = theta0 lambda^{-1/(p+1)} U0.
Field u0_from_U0(const Field& U0, double theta0, const ModelParams& mp);

// Finite-dimensional handle: (d0,d1) -> (q0, q1)(s0), s0 = -ln T, through
// the compactly supported initial perturbation
//   q(y,s0) = [e^{-s0/(p+1)} U_{d0,d1}(y e^{-s0/2}, 0) - phi(y,s0)] psi_M0;
// the cut-off multiplies the whole difference so that q_e(s0) vanishes
// identically.
struct GammaResult {
  double q0 = 0.0;
  std::array<double, 3> q1{0.0, 0.0, 0.0};
  SpectralComponents comps;
};
GammaResult gamma_map(const InitialDataParams& d, const ShrinkParams& sp,
                      const ModelParams& mp, const HermiteBasis& basis);

class ConfigMap;

// Shrink parameters from config keys T_horizon, K0, A, M0, alpha0, eps0,
// delta0, C0, eta0, with the documented defaults for missing keys.
ShrinkParams shrink_from_config(const ConfigMap& c, const ModelParams& mp);
InitialDataParams initdata_from_config(const ConfigMap& c, int dim);

}  // namespace mq
