#include <cmath>

#include "doctest.h"
#include "verify/verify.hpp"

using namespace mq;

namespace {

ModelParams ode_params() {
  ModelParams mp;
  mp.lambda = 1.0;
  mp.gamma = 0.0;
  mp.dim = 1;
  mp.radius = 1.0;
  return mp;
}

}  // namespace

TEST_CASE("intermediate profile error on synthetic fields") {
  ModelParams mp = ode_params();
  RunConfig rc;
  auto g = share(make_graded_grid(256, 1.0, 1.0));
  const double T = 0.05, t = 0.045, theta_star = 1.3;
  QuenchEstimate est;
  est.T_hat = T;
  const double tau = T - t;
  const double lnfac = std::fabs(std::log(tau));

  SolutionTrace tr;
  Field u(g, t);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double z2 = g->nodes[j] * g->nodes[j] / (tau * lnfac);
    const double prof = theta_star * std::pow(3.0 + 9.0 / 8.0 * z2, -1.0 / 3.0);
    u[j] = 1.0 - std::pow(tau, 1.0 / 3.0) / prof;  // exact profile shape
  }
  tr.snapshots.push_back(u);
  tr.snapshot_theta.push_back(1.0);

  SUBCASE("exact profile has zero deviation") {
    const ProfilePoint pt =
        intermediate_profile_error(tr, 0, est, theta_star, mp, rc);
    CHECK(pt.deviation == doctest::Approx(0.0).epsilon(1e-10).scale(1.0));
  }
  SUBCASE("a 1/sqrt|ln| perturbation maps to E = its amplitude") {
    Field& uu = tr.snapshots[0];
    for (std::size_t j = 0; j < uu.size(); ++j) {
      const double z2 = g->nodes[j] * g->nodes[j] / (tau * lnfac);
      const double prof =
          theta_star * std::pow(3.0 + 9.0 / 8.0 * z2, -1.0 / 3.0) +
          0.01 / std::sqrt(lnfac);
      uu[j] = 1.0 - std::pow(tau, 1.0 / 3.0) / prof;
    }
    const ProfilePoint pt =
        intermediate_profile_error(tr, 0, est, theta_star, mp, rc);
    CHECK(pt.scaled == doctest::Approx(0.01).epsilon(1e-9));
  }
}

TEST_CASE("final profile ratio on synthetic cusps") {
  const ModelParams mp = ode_params();
  auto g = share(make_graded_grid(512, 1.0, 1.0));
  const double theta_star = 1.2;
  Field u(g);
  for (std::size_t j = 1; j < u.size(); ++j) {
    const double x = g->nodes[j];
    u[j] = 1.0 - theta_star * std::pow(9.0 / 16.0 * x * x /
                                           std::fabs(std::log(x)),
                                       1.0 / 3.0);
  }
  u[0] = 1.0 - 1e-6;
  SUBCASE("exact asymptotic gives ratio 1") {
    const auto series = final_profile_ratio(u, theta_star, 1e-3, 0.1, mp);
    for (const auto& [x, r] : series)
      REQUIRE(r == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("doubling theta* halves the ratio") {
    const auto series = final_profile_ratio(u, 2.0 * theta_star, 1e-3, 0.1, mp);
    for (const auto& [x, r] : series)
      REQUIRE(r == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("empty band throws") {
    CHECK_THROWS_AS(final_profile_ratio(u, theta_star, 0.5, 0.4, mp),
                    std::invalid_argument);
  }
}

TEST_CASE("component ODE trends on synthetic series") {
  // q0 = c e^s solves q0' = q0; q2 = c/s^2 solves q2' + 2 q2/s = 0
  std::vector<std::pair<double, SpectralComponents>> series;
  const RadialGrid g = make_graded_grid(16, 1.0, 1.0);
  for (int i = 0; i < 9; ++i) {
    const double s = 10.0 + 0.25 * i;
    SpectralComponents c;
    c.n = 1;
    c.s = s;
    c.q0 = 1e-6 * std::exp(s - 10.0);
    c.q1[0] = 2e-4 * std::exp(0.5 * (s - 10.0));
    c.q2[0][0] = 3.0 / (s * s);
    series.emplace_back(s, c);
  }
  const OdeTrendReport rep = ode_trend_q012(series, 30.0);
  // centered differences are O(ds^2)-accurate; the scaled residuals stay tiny
  CHECK(rep.max_r0 < 2e-3);
  CHECK(rep.max_r1 < 2e-3);
  CHECK(rep.max_r2 < 1e-4);

  std::vector<std::pair<double, SpectralComponents>> tiny(series.begin(),
                                                          series.begin() + 3);
  CHECK_THROWS_AS(ode_trend_q012(tiny, 30.0), std::invalid_argument);
}

TEST_CASE("theta discipline report") {
  const ModelParams mp = ode_params();
  SUBCASE("flat gamma-zero trace") {
    ThetaTrace tr;
    for (int i = 0; i <= 10; ++i) tr.push(i * 0.01, 0.0, 1.0);
    const ThetaReport rep = theta_bounds_report(tr, 0.2, mp);
    CHECK(rep.theta_ge_1);
    CHECK(rep.gamma_zero_exact);
    CHECK(rep.tail_width == 0.0);
    CHECK(rep.scaled_prime_max == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("a sample below 1 is flagged hard") {
    ThetaTrace tr;
    tr.push(0.0, 0.0, 1.2);
    tr.samples.push_back({0.1, 0.0, 0.9, std::nan("")});
    const ThetaReport rep = theta_bounds_report(tr, 0.2, mp);
    CHECK(!rep.theta_ge_1);
  }
}

TEST_CASE("stability probe") {
  const ModelParams mp = ode_params();
  RunConfig rc;
  rc.diffusion_enabled = false;
  rc.quench_stop = 1e-3;
  auto g = share(make_graded_grid(32, 1.0, 1.0));
  Field u0(g);
  for (std::size_t j = 0; j < u0.size(); ++j)
    u0[j] = 0.3 * (1.0 - g->nodes[j] * g->nodes[j]);
  u0.values.back() = 0.0;

  SUBCASE("zero perturbation reproduces the estimates") {
    const StabilityReport rep = stability_probe(u0, 0.0, mp, rc);
    CHECK(rep.status == RunStatus::quenched);
    CHECK(rep.dT == 0.0);
    CHECK(rep.dtheta_star == 0.0);
    CHECK(rep.quench_point_shift == 0.0);
  }
  SUBCASE("small perturbation moves the estimates a little") {
    const StabilityReport rep = stability_probe(u0, 1e-4, mp, rc);
    CHECK(rep.status == RunStatus::quenched);
    CHECK(rep.dT < 1e-2 * rep.base.T_hat);
  }
  SUBCASE("scale guard") {
    CHECK_THROWS_AS(stability_probe(u0, 0.5, mp, rc), std::invalid_argument);
  }
}
