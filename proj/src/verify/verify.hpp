#pragma once

#include <vector>

#include "core/types.hpp"
#include "regions/regions.hpp"
#include "solver/solver.hpp"
#include "spectral/spectral.hpp"

namespace mq {

// Scaled intermediate-profile deviation at one snapshot time.
struct ProfilePoint {
  double t = 0.0;
  double s = 0.0;          // -ln(T_hat - t)
  double deviation = 0.0;  // sup-norm mismatch against the profile
  double scaled = 0.0;     // deviation * sqrt(|ln(T_hat - t)|)
};

struct ProfileReport {
  std::vector<ProfilePoint> intermediate;      // E(s) series
  std::vector<std::pair<double, double>> final_ratio;  // (|x|, ratio)
  double center_rate_slope = 0.0;
  double center_rate_decades = 0.0;
  double theta_star_hat = 0.0;
  double final_decade_mean = 0.0;  // mean ratio over the deepest decade
};

// sup over grid nodes (with 1-u >= quench_stop/2) of
// |(T-t)^{1/(p+1)}/(1-u) - theta* (p+1 + (p+1)^2/(4p) z^2)^{-1/(p+1)}|,
// z^2 = |x|^2 / ((T-t)|ln(T-t)|).
ProfilePoint intermediate_profile_error(const SolutionTrace& trace,
                                        std::size_t snapshot_index,
                                        const QuenchEstimate& est,
                                        double theta_star,
                                        const ModelParams& mp,
                                        const RunConfig& rc);

// Ratios (1-u*(x)) / (theta* [(p+1)^2/(8p) x^2/|ln x|]^{1/(p+1)}) on the
// admissible band; x_lo defaults to the quench-scale radius at the stop
// time, x_hi to eps0.
std::vector<std::pair<double, double>> final_profile_ratio(
    const Field& u_final, double theta_star, double x_lo, double x_hi,
    const ModelParams& mp);

// Residual trends of the component drift laws:
// q0' - q0 and q1' - q1/2 scaled by s^2, (q2' + 2 q2/s) scaled by s^3/A.
struct OdeTrendReport {
  std::vector<double> s;
  std::vector<double> r0_scaled;
  std::vector<double> r1_scaled;
  std::vector<double> r2_scaled;
  double max_r0 = 0.0, max_r1 = 0.0, max_r2 = 0.0;
};
OdeTrendReport ode_trend_q012(
    const std::vector<std::pair<double, SpectralComponents>>& series, double A);

// theta discipline over a completed run.
struct ThetaReport {
  bool theta_ge_1 = false;        // exact check over every sample
  double theta_min = 0.0, theta_max = 0.0;
  double mu_max = 0.0;
  double scaled_prime_max = 0.0;  // |theta'| (T-t)^{-(3n-8)/6} |ln(T-t)|^{-n}
  double theta_T = 0.0;           // last sample
  double tail_width = 0.0;        // max-min over the final decade of T-t
  bool gamma_zero_exact = false;  // theta == 1 on every sample
};
ThetaReport theta_bounds_report(const ThetaTrace& trace, double T_hat,
                                const ModelParams& mp);

// Rerun with smoothly perturbed initial data and compare the estimates.
struct StabilityReport {
  RunStatus status = RunStatus::running;
  double dT = 0.0;
  double dtheta_star = 0.0;
  double quench_point_shift = 0.0;  // |r_pert - r_base| of the arg-max node
  QuenchEstimate base, perturbed;
};
StabilityReport stability_probe(const Field& base_u0, double scale,
                                const ModelParams& mp, const RunConfig& rc);

}  // namespace mq
