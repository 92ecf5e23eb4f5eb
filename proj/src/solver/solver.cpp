#include "solver/solver.hpp"

#include <algorithm>
#include <cmath>

namespace mq {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::running: return "running";
    case RunStatus::quenched: return "quenched";
    case RunStatus::max_steps: return "max_steps";
    case RunStatus::aborted_nan: return "aborted_nan";
  }
  return "?";
}

namespace {

// scratch buffers for the RK4 stages, reused across steps
struct Stepper {
  const ModelParams& mp;
  const RunConfig& rc;
  const RadialGrid& g;
  std::vector<double> k1, k2, k3, k4, tmp;
  double omega;

  Stepper(const ModelParams& m, const RunConfig& r, const RadialGrid& grid)
      : mp(m), rc(r), g(grid) {
    const std::size_t mcount = g.nodes.size();
    k1.resize(mcount);
    k2.resize(mcount);
    k3.resize(mcount);
    k4.resize(mcount);
    tmp.resize(mcount);
    omega = sphere_measure(mp.dim);
  }

  // trapezoid of (1-u)^{-1} r^{n-1}; false when any u >= 1
  bool inv_integral(const std::vector<double>& u, double* out) const {
    const auto& r = g.nodes;
    const double n = mp.dim;
    double acc = 0.0;
    double prev = 1.0 / (1.0 - u[0]) * std::pow(r[0], n - 1.0);
    if (!(u[0] < 1.0)) return false;
    for (std::size_t j = 1; j < u.size(); ++j) {
      if (!(u[j] < 1.0)) return false;
      const double cur = 1.0 / (1.0 - u[j]) * std::pow(r[j], n - 1.0);
      acc += 0.5 * (prev + cur) * (r[j] - r[j - 1]);
      prev = cur;
    }
    *out = omega * acc;
    return true;
  }

  // rhs into `out`; false when the state is outside [0,1) (stage rejected)
  bool eval(const std::vector<double>& u, std::vector<double>* out) const {
    for (double v : u)
      if (!(v >= 0.0 && v < 1.0)) return false;
    double I = 0.0;
    if (!inv_integral(u, &I)) return false;
    const double alpha =
        mp.lambda * std::pow(1.0 + mp.gamma * I, -mp.q_exp);
    const auto& r = g.nodes;
    const std::size_t m = u.size();
    auto& f = *out;
    if (rc.diffusion_enabled) {
      // origin: n * u_rr(0) with the symmetric parabola through (r0, r1)
      f[0] = mp.dim * 2.0 * (u[1] - u[0]) / (r[1] * r[1]);
      for (std::size_t j = 1; j + 1 < m; ++j) {
        const double hm = r[j] - r[j - 1], hp = r[j + 1] - r[j];
        const double urr =
            2.0 * ((u[j + 1] - u[j]) / hp - (u[j] - u[j - 1]) / hm) / (hm + hp);
        const double ur = (hm * hm * u[j + 1] + (hp * hp - hm * hm) * u[j] -
                           hp * hp * u[j - 1]) /
                          (hm * hp * (hm + hp));
        f[j] = urr + (mp.dim - 1.0) / r[j] * ur;
      }
      f[m - 1] = 0.0;  // Dirichlet boundary held at zero
      for (std::size_t j = 0; j + 1 < m; ++j)
        f[j] += alpha * std::pow(1.0 - u[j], -mp.p_exp);
    } else {
      for (std::size_t j = 0; j < m; ++j)
        f[j] = alpha * std::pow(1.0 - u[j], -mp.p_exp);
    }
    return true;
  }

  double stable_dt(const std::vector<double>& u) const {
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, v);
    const double src = rc.source_safety *
                       std::pow(1.0 - umax, mp.p_exp + 1.0) /
                       (mp.lambda * mp.p_exp);
    if (!rc.diffusion_enabled) return src;
    const double h = g.min_spacing();
    return std::min(rc.cfl_safety * h * h, src);
  }

  // one attempted RK4 update of `u` with step dt into `out`
  bool rk4(const std::vector<double>& u, double dt,
           std::vector<double>* out) {
    const std::size_t m = u.size();
    if (!eval(u, &k1)) return false;
    for (std::size_t j = 0; j < m; ++j) tmp[j] = u[j] + 0.5 * dt * k1[j];
    if (!eval(tmp, &k2)) return false;
    for (std::size_t j = 0; j < m; ++j) tmp[j] = u[j] + 0.5 * dt * k2[j];
    if (!eval(tmp, &k3)) return false;
    for (std::size_t j = 0; j < m; ++j) tmp[j] = u[j] + dt * k3[j];
    if (!eval(tmp, &k4)) return false;
    auto& v = *out;
    const double cap = 1.0 - 0.5 * rc.quench_stop;
    for (std::size_t j = 0; j < m; ++j) {
      v[j] = u[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      if (!(v[j] >= 0.0 && v[j] < cap)) return false;
    }
    return true;
  }
};

double max_value(const std::vector<double>& v, int* arg = nullptr) {
  double m = v[0];
  int a = 0;
  for (std::size_t j = 1; j < v.size(); ++j)
    if (v[j] > m) {
      m = v[j];
      a = static_cast<int>(j);
    }
  if (arg) *arg = a;
  return m;
}

}  // namespace

Field rhs_u(const Field& u, const ModelParams& mp, const RunConfig& rc) {
  u.validate();
  Stepper st(mp, rc, *u.grid);
  Field out(u.grid, u.time);
  if (!st.eval(u.values, &out.values))
    throw std::invalid_argument("rhs_u: u outside [0,1)");
  return out;
}

StepResult step(const Field& u, const ModelParams& mp, const RunConfig& rc) {
  u.validate();
  Stepper st(mp, rc, *u.grid);
  StepResult res;
  res.u = Field(u.grid, u.time);
  double dt = st.stable_dt(u.values);
  while (true) {
    if (dt < 1e-16) {
      res.quench_signal = true;
      res.u = u;
      res.dt = 0.0;
      return res;
    }
    if (st.rk4(u.values, dt, &res.u.values)) break;
    dt *= 0.5;
  }
  res.u.time = u.time + dt;
  res.dt = dt;
  return res;
}

SolutionTrace run_to_quench(const Field& u0, const ModelParams& mp,
                            const RunConfig& rc) {
  u0.validate();
  mp.validate();
  rc.validate();
  u0.grid->validate();
  for (double v : u0.values)
    if (!(v >= 0.0 && v < 1.0))
      throw std::invalid_argument("run_to_quench: u0 must lie in [0,1)");
  if (rc.diffusion_enabled && u0.values.back() != 0.0)
    throw std::invalid_argument("run_to_quench: u0 must vanish at r = R");

  SolutionTrace tr;
  Stepper st(mp, rc, *u0.grid);
  const double vol = ball_volume(mp);

  std::vector<double> snap_times = rc.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  std::size_t next_snap = 0;

  Field u = u0;
  const double lam_p = std::pow(mp.lambda, 1.0 / (mp.p_exp + 1.0));

  auto record_state = [&](double t) {
    double I = 0.0;
    if (!st.inv_integral(u.values, &I)) return;
    const double iubar = I - vol;  // int ubar = int (1-u)^{-1} - |Omega|
    const double theta =
        std::pow(1.0 + mp.gamma * iubar, 2.0 / 3.0);
    const double mu = lam_p * std::max(iubar, 0.0) / theta;
    tr.theta.push(t, mu, theta);
    tr.center.emplace_back(t, 1.0 - u.values[0]);
  };
  auto snapshot = [&]() {
    tr.snapshots.push_back(u);
    tr.snapshot_theta.push_back(tr.theta.samples.back().theta);
  };

  record_state(0.0);
  snapshot();

  // extra snapshots whenever the center value crosses 10^{-k/8} levels
  int level_k = static_cast<int>(
      std::ceil(-8.0 * std::log10(std::max(1.0 - u.values[0], 1e-300))));
  auto level_value = [&]() { return std::pow(10.0, -level_k / 8.0); };

  double t = 0.0;
  for (long n = 0; n < rc.max_steps; ++n) {
    double dt = st.stable_dt(u.values);
    bool forced_snap = false;
    if (next_snap < snap_times.size() && t + dt >= snap_times[next_snap]) {
      dt = snap_times[next_snap] - t;
      forced_snap = true;
    }
    bool quench_sig = false;
    while (true) {
      if (dt < 1e-16) {
        quench_sig = true;
        break;
      }
      if (st.rk4(u.values, dt, &st.tmp)) break;
      dt *= 0.5;
      forced_snap = false;
    }
    if (quench_sig) {
      tr.status = RunStatus::quenched;
      break;
    }
    u.values.swap(st.tmp);
    t += dt;
    u.time = t;
    ++tr.steps;
    if (forced_snap) ++next_snap;

    int argmax = 0;
    const double umax = max_value(u.values, &argmax);
    if (!std::isfinite(umax) || !std::isfinite(u.values[0])) {
      tr.status = RunStatus::aborted_nan;
      snapshot();  // diagnostic snapshot
      tr.argmax_node = argmax;
      tr.t_end = t;
      return tr;
    }
    record_state(t);

    bool want_snap = forced_snap || (tr.steps % rc.output_cadence == 0);
    while (1.0 - u.values[0] < level_value()) {
      want_snap = true;
      ++level_k;
    }
    if (1.0 - umax < rc.quench_stop) {
      tr.status = RunStatus::quenched;
      tr.argmax_node = argmax;
      snapshot();
      tr.t_end = t;
      return tr;
    }
    if (want_snap) snapshot();
  }

  if (tr.status != RunStatus::quenched) tr.status = RunStatus::max_steps;
  int argmax = 0;
  max_value(u.values, &argmax);
  tr.argmax_node = argmax;
  tr.t_end = t;
  if (tr.snapshots.back().time != t) snapshot();
  return tr;
}

QuenchEstimate estimate_quench_time(const SolutionTrace& trace,
                                    const ModelParams& mp,
                                    const RunConfig& rc) {
  const double lo = rc.quench_stop;
  const double hi = 10.0 * std::sqrt(rc.quench_stop);
  const double P = mp.p_exp + 1.0;
  std::vector<std::pair<double, double>> pts;  // (t, (1-u)^{p+1})
  std::vector<std::pair<double, double>> raw;  // (t, 1-u)
  for (const auto& [t, omc] : trace.center)
    if (omc >= lo && omc <= hi) {
      pts.emplace_back(t, std::pow(omc, P));
      raw.emplace_back(t, omc);
    }
  if (pts.size() < 20)
    throw std::runtime_error(
        "estimate_quench_time: fewer than 20 samples in the fit window");
  // centered least squares for conditioning
  double tbar = 0.0, zbar = 0.0;
  for (auto& [t, z] : pts) {
    tbar += t;
    zbar += z;
  }
  tbar /= pts.size();
  zbar /= pts.size();
  double stt = 0.0, stz = 0.0;
  for (auto& [t, z] : pts) {
    stt += (t - tbar) * (t - tbar);
    stz += (t - tbar) * (z - zbar);
  }
  const double slope = stz / stt;
  if (!(slope < 0.0))
    throw std::runtime_error("estimate_quench_time: nonnegative slope");
  QuenchEstimate est;
  est.T_hat = tbar - zbar / slope;
  est.fit_window_lo = pts.front().first;
  est.fit_window_hi = pts.back().first;
  est.samples_used = static_cast<long>(pts.size());
  double ss = 0.0, zmax = 0.0;
  for (auto& [t, z] : pts) {
    const double fit = zbar + slope * (t - tbar);
    ss += (z - fit) * (z - fit);
    zmax = std::max(zmax, std::fabs(z));
  }
  est.fit_residual = std::sqrt(ss / pts.size()) / zmax;

  std::vector<double> theta_vals;
  const double pfac = std::pow(P, 1.0 / P);
  for (auto& [t, omc] : raw)
    if (est.T_hat > t)
      theta_vals.push_back(pfac * std::pow(est.T_hat - t, 1.0 / P) / omc);
  if (theta_vals.empty())
    throw std::runtime_error("estimate_quench_time: empty rate window");
  std::nth_element(theta_vals.begin(),
                   theta_vals.begin() + theta_vals.size() / 2,
                   theta_vals.end());
  est.theta_star_hat = theta_vals[theta_vals.size() / 2];
  return est;
}

RateSlope center_rate_slope(const SolutionTrace& trace, double T_hat,
                            double lo, double hi) {
  std::vector<std::pair<double, double>> pts;  // (ln(T-t), ln(1-u))
  double omin = 1e300, omax = 0.0;
  for (const auto& [t, omc] : trace.center) {
    if (omc < lo || omc > hi || T_hat - t <= 0.0) continue;
    pts.emplace_back(std::log(T_hat - t), std::log(omc));
    omin = std::min(omin, omc);
    omax = std::max(omax, omc);
  }
  RateSlope rs;
  rs.samples = static_cast<long>(pts.size());
  if (pts.size() < 10) return rs;
  double xbar = 0.0, ybar = 0.0;
  for (auto& [x, y] : pts) {
    xbar += x;
    ybar += y;
  }
  xbar /= pts.size();
  ybar /= pts.size();
  double sxx = 0.0, sxy = 0.0;
  for (auto& [x, y] : pts) {
    sxx += (x - xbar) * (x - xbar);
    sxy += (x - xbar) * (y - ybar);
  }
  rs.slope = sxy / sxx;
  rs.decades = std::log10(omax / omin);
  return rs;
}

}  // namespace mq
