#include "regions/regions.hpp"

#include <cmath>

#include "core/interp.hpp"
#include "io/config.hpp"
#include "nonlocal/theta.hpp"
#include "selfsim/cutoff.hpp"
#include "selfsim/selfsim.hpp"

namespace mq {

void ShrinkParams::validate() const {
  const double e2 = std::exp(-2.0);
  if (!(T > 0.0 && T < e2))
    throw std::invalid_argument("shrink params: need T in (0, e^{-2})");
  for (double v : {K0, eps0, alpha0, A, delta0, C0, eta0, M0})
    if (!(v > 0.0))
      throw std::invalid_argument("shrink params: all parameters positive");
}

double u_hat(double tau, const ShrinkParams& sp, const ModelParams& mp) {
  const double P = mp.p_exp + 1.0;
  const double b = P * P / (4.0 * mp.p_exp);
  const double base = P * (1.0 - tau) + b * sp.K0 * sp.K0 / 16.0;
  if (!(base > 0.0)) throw std::invalid_argument("u_hat: nonpositive base");
  return std::pow(base, -1.0 / P);
}

ShrinkParams shrink_defaults(double T, const ModelParams& mp) {
  ShrinkParams sp;
  sp.T = T;
  sp.eps0 = std::min(mp.radius / 8.0, 1.0 / (2.0 * sp.M0));
  sp.delta0 = 0.5 * u_hat(0.0, sp, mp);
  sp.validate();
  return sp;
}

void InitialDataParams::validate(int n) const {
  if (!(std::fabs(d0) <= 2.0))
    throw std::invalid_argument("initial data: |d0| <= 2 required");
  for (int i = 0; i < n; ++i)
    if (!(std::fabs(d1[i]) <= 2.0))
      throw std::invalid_argument("initial data: |d1| <= 2 required");
}

double p1_radius(double t, const ShrinkParams& sp) {
  if (!(t < sp.T)) throw std::invalid_argument("p1_radius: t must be < T");
  const double tau = sp.T - t;
  return sp.K0 * std::sqrt(tau * std::fabs(std::log(tau)));
}

std::pair<double, double> t_of_x(double absx, const ShrinkParams& sp) {
  if (!(absx > 0.0)) throw std::invalid_argument("t_of_x: need |x| > 0");
  auto radius_of = [&](double tau) {
    return 0.25 * sp.K0 * std::sqrt(tau * std::fabs(std::log(tau)));
  };
  const double rmax = radius_of(sp.T);
  if (absx > rmax * (1.0 + 1e-12))
    throw std::invalid_argument("t_of_x: |x| beyond the monotone range");
  // tau |ln tau| is monotone for tau < e^{-1}; T < e^{-2} guarantees it
  double lo = 0.0, hi = sp.T;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (radius_of(mid) < absx)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-18 * sp.T) break;
  }
  double tau = 0.5 * (lo + hi);
  if (std::fabs(radius_of(tau) - absx) > 1e-12 * absx)
    throw std::runtime_error("t_of_x: inversion residual too large");
  return {sp.T - tau, tau};
}

double rescaled_U(const SolutionTrace& trace, double x, double xi, double tau,
                  const ShrinkParams& sp, const ModelParams& mp) {
  const auto [tx, rho] = t_of_x(std::fabs(x), sp);
  const double r = std::fabs(x + xi * std::sqrt(rho));
  const double tq = rho * tau + tx;
  // locate bracketing snapshots
  const auto& snaps = trace.snapshots;
  if (snaps.empty() || tq < snaps.front().time - 1e-14 ||
      tq > snaps.back().time + 1e-14)
    throw std::invalid_argument("rescaled_U: time outside stored snapshots");
  std::size_t i = 1;
  while (i + 1 < snaps.size() && snaps[i].time < tq) ++i;
  const Field& a = snaps[i - 1];
  const Field& b = snaps[i];
  if (r > a.grid->rmax() + 1e-14)
    throw std::invalid_argument("rescaled_U: point outside the domain");
  const double ua = eval_radial(a, r);
  const double ub = eval_radial(b, r);
  const double uq = linear_interp(a.time, ua, b.time, ub, tq);
  const double tha = trace.snapshot_theta[i - 1];
  const double thb = trace.snapshot_theta[i];
  const double theta = linear_interp(a.time, tha, b.time, thb, tq);
  const double ubar = uq / (1.0 - uq);
  const double P = mp.p_exp + 1.0;
  const double U = std::pow(mp.lambda, 1.0 / P) / theta * ubar;
  return std::pow(rho, 1.0 / P) * U;
}

double H_star_value(double r, const ModelParams& mp) {
  const double P = mp.p_exp + 1.0;
  const double c = P * P / (8.0 * mp.p_exp);
  const double bound = 0.5 * mp.radius;
  if (r >= bound || r <= 0.0) return r <= 0.0 ? 1e300 : 0.0;
  const double inner = std::min(0.25 * mp.radius, 0.5);
  const double cusp =
      std::pow(c * r * r / std::fabs(std::log(r)), -1.0 / P);
  if (r <= inner) return cusp;
  // quintic blend down to zero on [inner, R/2], staying below the cusp
  return cusp * (1.0 - smoothstep5(r, inner, bound));
}

Field build_H_star(const RadialGrid& grid, const ModelParams& mp) {
  grid.validate();
  Field f(share(grid));
  for (std::size_t j = 0; j < f.size(); ++j)
    f[j] = grid.nodes[j] == 0.0 ? H_star_value(grid.nodes[1] * 0.5, mp)
                                : H_star_value(grid.nodes[j], mp);
  // the cusp diverges at the origin; the first node carries the midpoint
  // value of the first cell so the field stays finite
  return f;
}

double initial_U_value(const std::array<double, 3>& x,
                       const InitialDataParams& d, const ShrinkParams& sp,
                       const ModelParams& mp) {
  const double T = sp.T;
  const double s0 = -std::log(T);
  const double P = mp.p_exp + 1.0;
  double r2 = 0.0;
  for (int i = 0; i < mp.dim; ++i) r2 += x[i] * x[i];
  const double r = std::sqrt(r2);
  const double sqT = std::sqrt(T);
  const double zden = std::sqrt(T * std::fabs(std::log(T)));
  const double chi1 = chi0(r / (sqT * std::fabs(std::log(T))));
  double core = 0.0;
  if (chi1 > 0.0) {
    double dz = d.d0;
    const double zr = r / zden;
    const double plateau = chi0(zr / (sp.K0 / 32.0));
    if (plateau > 0.0) {
      for (int i = 0; i < mp.dim; ++i) dz += d.d1[i] * (x[i] / zden);
      dz *= plateau;
    } else {
      dz = 0.0;
    }
    core = std::pow(T, -1.0 / P) *
           (phi_profile(r / sqT, s0, mp) + dz) * chi1;
  }
  const double far = (1.0 - chi1) * H_star_value(r, mp);
  // taper to honor the zero boundary condition at moderate horizons where
  // the chi1 support spills past the domain
  const double taper = 1.0 - smoothstep5(r, 0.75 * mp.radius, mp.radius);
  return (core + far) * taper;
}

Field build_initial_U(const RadialGrid& grid, const InitialDataParams& d,
                      const ShrinkParams& sp, const ModelParams& mp) {
  grid.validate();
  sp.validate();
  d.validate(mp.dim);
  // the grid must resolve the sqrt(T) core scale
  int inside = 0;
  for (double r : grid.nodes)
    if (r > 0.0 && r <= std::sqrt(sp.T)) ++inside;
  if (inside < 8)
    throw std::invalid_argument(
        "build_initial_U: grid under-resolves sqrt(T): need >= 8 nodes");
  Field U(share(grid));
  for (std::size_t j = 0; j < U.size(); ++j) {
    U[j] = initial_U_value({grid.nodes[j], 0.0, 0.0}, d, sp, mp);
    if (!(U[j] >= 0.0))
      throw std::runtime_error("build_initial_U: negative value");
  }
  U.values.back() = 0.0;
  return U;
}

double theta0_fixed_point(const Field& U0, const ModelParams& mp) {
  for (double v : U0.values)
    if (!(v >= 0.0))
      throw std::invalid_argument("theta0_fixed_point: U0 must be >= 0");
  return theta_of_mu(integrate_radial(U0, mp), mp);
}

Field u0_from_U0(const Field& U0, double theta0, const ModelParams& mp) {
  Field ubar = U_to_ubar(U0, theta0, mp);
  Field u = ubar_to_u(ubar);
  return u;
}

GammaResult gamma_map(const InitialDataParams& d, const ShrinkParams& sp,
                      const ModelParams& mp, const HermiteBasis& basis) {
  sp.validate();
  d.validate(mp.dim);
  const double s0 = -std::log(sp.T);
  const double P = mp.p_exp + 1.0;
  const double e3 = std::exp(-s0 / P);   // T^{1/(p+1)}
  const double e2 = std::exp(-0.5 * s0); // sqrt(T)
  // the perturbation must be supported inside the plateau of chi(.,s0)
  if (2.0 * std::exp(0.5 * s0) / sp.M0 > sp.K0 * std::sqrt(s0))
    throw std::invalid_argument(
        "gamma_map: cut-off support exceeds the singular region; lower T or M0");
  PointFn qfn = [&](const double* y) {
    double r2 = 0.0;
    for (int i = 0; i < mp.dim; ++i) r2 += y[i] * y[i];
    const double rad = std::sqrt(r2);
    const double psi = psi_cut(rad, s0, sp.M0);
    if (psi == 0.0) return 0.0;
    std::array<double, 3> x{y[0] * e2, 0.0, 0.0};
    if (mp.dim > 1) x[1] = y[1] * e2;
    if (mp.dim > 2) x[2] = y[2] * e2;
    const double Uv = initial_U_value(x, d, sp, mp);
    return (e3 * Uv - phi_profile(rad, s0, mp)) * psi;
  };
  // output grid: covers the perturbation support and the quadrature extent
  const double ymax = std::max(3.0 * sp.K0 * std::sqrt(s0), 24.0);
  const RadialGrid out = make_graded_grid(256, ymax, 1.0);
  GammaResult res;
  res.comps = decompose_fn(qfn, s0, sp.K0, basis, out);
  res.q0 = res.comps.q0;
  res.q1 = res.comps.q1;
  return res;
}

ShrinkParams shrink_from_config(const ConfigMap& c, const ModelParams& mp) {
  ShrinkParams sp = shrink_defaults(c.get_real("T_horizon", 0.05), mp);
  sp.K0 = c.get_real("K0", sp.K0);
  sp.A = c.get_real("A", sp.A);
  sp.M0 = c.get_real("M0", sp.M0);
  sp.alpha0 = c.get_real("alpha0", sp.alpha0);
  sp.eps0 = c.get_real("eps0", std::min(mp.radius / 8.0, 1.0 / (2.0 * sp.M0)));
  sp.C0 = c.get_real("C0", sp.C0);
  sp.eta0 = c.get_real("eta0", sp.eta0);
  sp.delta0 = c.get_real("delta0", 0.5 * u_hat(0.0, sp, mp));
  if (sp.delta0 > 0.5 * u_hat(0.0, sp, mp) * (1.0 + 1e-12))
    throw std::invalid_argument("shrink params: delta0 must be <= u_hat(0)/2");
  sp.validate();
  return sp;
}

InitialDataParams initdata_from_config(const ConfigMap& c, int dim) {
  InitialDataParams d;
  d.d0 = c.get_real("d0", 0.0);
  const auto d1 = c.get_real_list("d1", {0.0});
  for (std::size_t i = 0; i < d1.size() && i < 3; ++i) d.d1[i] = d1[i];
  d.validate(dim);
  return d;
}

RegionReport check_membership(const SolutionTrace& trace, double t,
                              double T_hat, const ShrinkParams& sp,
                              const SpectralComponents& comps,
                              const HermiteBasis& basis,
                              const ModelParams& mp) {
  RegionReport rep;
  const double s = -std::log(sp.T - t > 0.0 ? sp.T - t : T_hat - t);
  if (!(s > 0.0))
    throw std::invalid_argument("check_membership: t too close to T");

  // singular region: six norms against the shrinking-set bounds
  const ComponentNorms nn = component_norms(comps, basis);
  const double ln_s = std::log(s);
  rep.p1_values = {nn.a_q0, nn.a_q1, nn.a_q2, nn.a_qminus, nn.a_qe,
                   nn.a_gradperp};
  rep.p1_bounds = {sp.A / (s * s),
                   sp.A / (s * s),
                   sp.A * sp.A * ln_s / (s * s),
                   sp.A * sp.A / (s * s),
                   sp.A * sp.A / std::sqrt(s),
                   sp.A / (s * s)};
  for (int i = 0; i < 6; ++i) {
    if (rep.p1_values[i] > rep.p1_bounds[i]) rep.p1_pass = false;
    rep.min_margin =
        std::min(rep.min_margin, 1.0 - rep.p1_values[i] / rep.p1_bounds[i]);
  }

  // intermediate region on a small lattice of (x, xi) pairs
  const double xlo = 0.25 * p1_radius(t, sp);
  const double xhi = sp.eps0;
  if (xlo >= xhi) {
    rep.p2_vacuous = true;
  } else {
    for (int ix = 0; ix < 8; ++ix) {
      const double x =
          xlo * std::pow(xhi / xlo, ix / 7.0);
      const auto [tx, rho] = t_of_x(x, sp);
      const double tau = (t - tx) / rho;
      const double half_span = sp.alpha0 * std::sqrt(std::fabs(std::log(rho)));
      const double uh = u_hat(tau, sp, mp);
      const double gbound = sp.C0 / std::sqrt(std::fabs(std::log(rho)));
      for (int jx = 0; jx < 9; ++jx) {
        const double xi = -half_span + 2.0 * half_span * jx / 8.0;
        double uv;
        try {
          uv = rescaled_U(trace, x, xi, tau, sp, mp);
        } catch (const std::invalid_argument&) {
          continue;  // lattice point outside stored data
        }
        const double dev = std::fabs(uv - uh);
        rep.p2_sup_dev = std::max(rep.p2_sup_dev, dev);
        if (dev > sp.delta0) rep.p2_pass = false;
        rep.min_margin = std::min(rep.min_margin, 1.0 - dev / sp.delta0);
        const double h = 0.25 * half_span + 1e-6;
        try {
          const double gp = rescaled_U(trace, x, xi + h, tau, sp, mp);
          const double gm = rescaled_U(trace, x, xi - h, tau, sp, mp);
          const double grad = std::fabs(gp - gm) / (2.0 * h);
          rep.p2_grad_margin = std::min(rep.p2_grad_margin, gbound - grad);
          if (grad > gbound) rep.p2_pass = false;
          rep.min_margin = std::min(rep.min_margin, 1.0 - grad / gbound);
        } catch (const std::invalid_argument&) {
        }
      }
    }
  }

  // regular region: drift from the initial data, gradient bound widened to
  // 2 eta0 because the heat-semigroup reference is replaced by grad U(.,0)
  const Field* ut = nullptr;
  double theta_t = 1.0;
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i)
    if (std::fabs(trace.snapshots[i].time - t) < 1e-12 + 1e-9 * sp.T) {
      ut = &trace.snapshots[i];
      theta_t = trace.snapshot_theta[i];
    }
  if (!ut)
    throw std::invalid_argument("check_membership: no snapshot at time t");
  const Field& u0 = trace.snapshots.front();
  const double theta_0 = trace.snapshot_theta.front();
  const Field U_t = ubar_to_U(u_to_ubar(*ut), theta_t, mp);
  const Field U_0 = ubar_to_U(u_to_ubar(u0), theta_0, mp);
  const auto g_t = grid_gradient(*U_t.grid, U_t.values);
  const auto g_0 = grid_gradient(*U_0.grid, U_0.values);
  const auto& r = U_t.grid->nodes;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (r[j] < 0.25 * sp.eps0) continue;
    rep.p3_sup_dev = std::max(rep.p3_sup_dev, std::fabs(U_t[j] - U_0[j]));
    rep.p3_grad_dev = std::max(rep.p3_grad_dev, std::fabs(g_t[j] - g_0[j]));
  }
  if (rep.p3_sup_dev > sp.eta0) rep.p3_pass = false;
  if (rep.p3_grad_dev > 2.0 * sp.eta0) rep.p3_pass = false;
  rep.min_margin = std::min(rep.min_margin, 1.0 - rep.p3_sup_dev / sp.eta0);
  rep.min_margin =
      std::min(rep.min_margin, 1.0 - rep.p3_grad_dev / (2.0 * sp.eta0));
  return rep;
}

}  // namespace mq
