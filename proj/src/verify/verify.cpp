#include "verify/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mq {

ProfilePoint intermediate_profile_error(const SolutionTrace& trace,
                                        std::size_t snapshot_index,
                                        const QuenchEstimate& est,
                                        double theta_star,
                                        const ModelParams& mp,
                                        const RunConfig& rc) {
  const Field& u = trace.snapshots.at(snapshot_index);
  const double t = u.time;
  const double tau = est.T_hat - t;
  if (!(tau > 0.0))
    throw std::invalid_argument("intermediate_profile_error: t beyond T_hat");
  const double P = mp.p_exp + 1.0;
  const double b = P * P / (4.0 * mp.p_exp);
  const double lnfac = std::fabs(std::log(tau));
  ProfilePoint pt;
  pt.t = t;
  pt.s = -std::log(tau);
  const auto& r = u.grid->nodes;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double omc = 1.0 - u[j];
    if (omc < 0.5 * rc.quench_stop) continue;  // saturated cells
    const double z2 = r[j] * r[j] / (tau * lnfac);
    const double profile = theta_star * std::pow(P + b * z2, -1.0 / P);
    const double dev = std::fabs(std::pow(tau, 1.0 / P) / omc - profile);
    pt.deviation = std::max(pt.deviation, dev);
  }
  pt.scaled = pt.deviation * std::sqrt(lnfac);
  return pt;
}

std::vector<std::pair<double, double>> final_profile_ratio(
    const Field& u_final, double theta_star, double x_lo, double x_hi,
    const ModelParams& mp) {
  const double P = mp.p_exp + 1.0;
  const double c = P * P / (8.0 * mp.p_exp);
  std::vector<std::pair<double, double>> out;
  const auto& r = u_final.grid->nodes;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (r[j] <= x_lo || r[j] >= x_hi) continue;
    const double cusp =
        theta_star * std::pow(c * r[j] * r[j] / std::fabs(std::log(r[j])), 1.0 / P);
    out.emplace_back(r[j], (1.0 - u_final[j]) / cusp);
  }
  if (out.empty())
    throw std::invalid_argument("final_profile_ratio: empty admissible band");
  return out;
}

OdeTrendReport ode_trend_q012(
    const std::vector<std::pair<double, SpectralComponents>>& series,
    double A) {
  if (series.size() < 5)
    throw std::invalid_argument("ode_trend_q012: need >= 5 samples");
  for (std::size_t i = 1; i < series.size(); ++i)
    if (!(series[i].first - series[i - 1].first <= 0.5 + 1e-12))
      throw std::invalid_argument("ode_trend_q012: spacing must be <= 0.5");
  OdeTrendReport rep;
  const int n = series.front().second.n;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const double sm = series[i - 1].first, s = series[i].first,
                 sp = series[i + 1].first;
    const auto& cm = series[i - 1].second;
    const auto& cc = series[i].second;
    const auto& cp = series[i + 1].second;
    const double hm = s - sm, hp = sp - s;
    auto ddt = [&](double fm, double f0, double fp) {
      return (hm * hm * fp + (hp * hp - hm * hm) * f0 - hp * hp * fm) /
             (hm * hp * (hm + hp));
    };
    const double r0 = ddt(cm.q0, cc.q0, cp.q0) - cc.q0;
    double r1 = 0.0, r2 = 0.0;
    for (int a = 0; a < n; ++a)
      r1 = std::max(r1, std::fabs(ddt(cm.q1[a], cc.q1[a], cp.q1[a]) -
                                  0.5 * cc.q1[a]));
    for (int a = 0; a < n; ++a)
      for (int bidx = 0; bidx < n; ++bidx)
        r2 = std::max(r2, std::fabs(ddt(cm.q2[a][bidx], cc.q2[a][bidx],
                                        cp.q2[a][bidx]) +
                                    2.0 / s * cc.q2[a][bidx]));
    rep.s.push_back(s);
    rep.r0_scaled.push_back(std::fabs(r0) * s * s);
    rep.r1_scaled.push_back(r1 * s * s);
    rep.r2_scaled.push_back(r2 * s * s * s / A);
    rep.max_r0 = std::max(rep.max_r0, rep.r0_scaled.back());
    rep.max_r1 = std::max(rep.max_r1, rep.r1_scaled.back());
    rep.max_r2 = std::max(rep.max_r2, rep.r2_scaled.back());
  }
  return rep;
}

ThetaReport theta_bounds_report(const ThetaTrace& trace, double T_hat,
                                const ModelParams& mp) {
  if (trace.samples.empty())
    throw std::invalid_argument("theta_bounds_report: empty trace");
  ThetaReport rep;
  rep.theta_ge_1 = true;
  rep.gamma_zero_exact = true;
  rep.theta_min = rep.theta_max = trace.samples.front().theta;
  const double n = mp.dim;
  const ThetaTrace withp = finite_diff_theta_prime(trace);
  for (const auto& smp : withp.samples) {
    rep.theta_min = std::min(rep.theta_min, smp.theta);
    rep.theta_max = std::max(rep.theta_max, smp.theta);
    rep.mu_max = std::max(rep.mu_max, smp.mu);
    if (!(smp.theta >= 1.0)) rep.theta_ge_1 = false;
    if (smp.theta != 1.0) rep.gamma_zero_exact = false;
    const double tau = T_hat - smp.t;
    if (tau > 0.0 && smp.has_prime()) {
      const double scale = std::pow(tau, -(3.0 * n - 8.0) / 6.0) *
                           std::pow(std::fabs(std::log(tau)), -n);
      rep.scaled_prime_max =
          std::max(rep.scaled_prime_max, std::fabs(smp.theta_prime) * scale);
    }
  }
  rep.theta_T = trace.samples.back().theta;
  const double tau_last = std::max(T_hat - trace.samples.back().t, 1e-300);
  double wmin = rep.theta_T, wmax = rep.theta_T;
  for (const auto& smp : trace.samples) {
    const double tau = T_hat - smp.t;
    if (tau > 0.0 && tau <= 10.0 * tau_last) {
      wmin = std::min(wmin, smp.theta);
      wmax = std::max(wmax, smp.theta);
    }
  }
  rep.tail_width = wmax - wmin;
  return rep;
}

StabilityReport stability_probe(const Field& base_u0, double scale,
                                const ModelParams& mp, const RunConfig& rc) {
  if (!(scale <= 0.01))
    throw std::invalid_argument("stability_probe: scale must be <= 0.01");
  StabilityReport rep;
  SolutionTrace base = run_to_quench(base_u0, mp, rc);
  rep.base = estimate_quench_time(base, mp, rc);

  // smooth random bump vanishing at the boundary with flat slope at 0
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double R = base_u0.grid->rmax();
  std::vector<double> amp(3);
  double norm = 0.0;
  for (double& a : amp) {
    a = unif(rng);
    norm += std::fabs(a);
  }
  Field pert = base_u0;
  for (std::size_t j = 0; j < pert.size(); ++j) {
    const double r = pert.grid->nodes[j];
    double bump = 0.0;
    for (int k = 0; k < 3; ++k)
      bump += amp[k] * std::cos((2 * k + 1) * std::numbers::pi * r / (2.0 * R));
    bump /= norm;
    pert[j] = std::max(0.0, base_u0[j] + scale * (1.0 - base_u0[j]) * bump);
  }
  pert.values.back() = 0.0;

  SolutionTrace run2 = run_to_quench(pert, mp, rc);
  rep.status = run2.status;
  if (run2.status == RunStatus::quenched) {
    rep.perturbed = estimate_quench_time(run2, mp, rc);
    rep.dT = std::fabs(rep.perturbed.T_hat - rep.base.T_hat);
    rep.dtheta_star =
        std::fabs(rep.perturbed.theta_star_hat - rep.base.theta_star_hat);
    rep.quench_point_shift =
        std::fabs(base.final_field().grid->nodes[base.argmax_node] -
                  run2.final_field().grid->nodes[run2.argmax_node]);
  }
  return rep;
}

}  // namespace mq
