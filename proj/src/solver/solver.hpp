#pragma once

#include <utility>
#include <vector>

#include "core/types.hpp"
#include "nonlocal/theta.hpp"

namespace mq {

enum class RunStatus { running, quenched, max_steps, aborted_nan };

const char* to_string(RunStatus s);

// Completed (or aborted) integration record.
struct SolutionTrace {
  RunStatus status = RunStatus::running;
  std::vector<Field> snapshots;          // u on the grid, includes t=0 and the end
  std::vector<double> snapshot_theta;    // theta at each snapshot time
  std::vector<std::pair<double, double>> center;  // (t, 1 - u(0,t)), every step
  ThetaTrace theta;                      // every accepted step
  long steps = 0;
  int argmax_node = 0;                   // of the final field
  double t_end = 0.0;

  const Field& final_field() const { return snapshots.back(); }
};

// Right-hand side Delta u + alpha(t) (1-u)^{-p}, radial Laplacian with the
// n*u_rr(0) regularization, Dirichlet u(R) = 0.  Diffusion can be switched
// off as a testing hook.
Field rhs_u(const Field& u, const ModelParams& mp, const RunConfig& rc);

// One adaptive RK4 step; rejects and halves dt while the update leaves
// [0, 1 - quench_stop/2).  Returns the updated field and the dt taken.
// dt underflow below 1e-16 signals quench and is reported via the flag.
struct StepResult {
  Field u;
  double dt = 0.0;
  bool quench_signal = false;
};
StepResult step(const Field& u, const ModelParams& mp, const RunConfig& rc);

// Integrate until 1 - max u < quench_stop (status quenched) or max_steps.
SolutionTrace run_to_quench(const Field& u0, const ModelParams& mp,
                            const RunConfig& rc);

struct QuenchEstimate {
  double T_hat = 0.0;
  double theta_star_hat = 0.0;
  double fit_window_lo = 0.0;  // in t
  double fit_window_hi = 0.0;
  double fit_residual = 0.0;   // rms residual of the linear fit, relative
  long samples_used = 0;
};

// Least-squares line through (t, (1-u(0,t))^{p+1}) over the window
// 1-u(0,t) in [quench_stop, 10 sqrt(quench_stop)]; T_hat is the root of the
// fit.  theta_star_hat is the median over the window of
// (p+1)^{1/(p+1)} (T_hat - t)^{1/(p+1)} / (1 - u(0,t)), the center-rate
// constant of the flat blow-up ((1-u)^{p+1} = (p+1) lambda (T-t) when the
// coupling is off).
QuenchEstimate estimate_quench_time(const SolutionTrace& trace,
                                    const ModelParams& mp,
                                    const RunConfig& rc);

// log-log slope of 1-u(0,t) against (T_hat - t) over the window
// 1-u(0,t) in [lo, hi]; also reports the decades spanned.
struct RateSlope {
  double slope = 0.0;
  double decades = 0.0;
  long samples = 0;
};
RateSlope center_rate_slope(const SolutionTrace& trace, double T_hat,
                            double lo, double hi);

}  // namespace mq
