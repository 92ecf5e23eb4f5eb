#include "mems_quench.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <sstream>
#include <thread>

#include "core/interp.hpp"

#include "io/config.hpp"
#include "io/format.hpp"
#include "io/rundir.hpp"
#include "nonlocal/theta.hpp"
#include "regions/regions.hpp"
#include "selfsim/selfsim.hpp"
#include "solver/solver.hpp"
#include "spectral/spectral.hpp"
#include "verify/verify.hpp"

using namespace mq;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return MQ_ERR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return MQ_ERR;
  }
}

}  // namespace

struct mq_config {
  ConfigMap map;
};

struct mq_run {
  LoadedRun lr;
  std::string dir;
};

extern "C" {

const char* mq_last_error(void) { return g_last_error.c_str(); }
const char* mq_version(void) { return "mqlab-0.1.0"; }

mq_config* mq_config_load(const char* path) {
  try {
    auto* c = new mq_config{ConfigMap::from_file(path)};
    return c;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

mq_config* mq_config_parse(const char* text) {
  try {
    return new mq_config{ConfigMap::from_string(text)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

mq_config* mq_config_clone(const mq_config* cfg) {
  return cfg ? new mq_config{cfg->map} : nullptr;
}

int mq_config_set(mq_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) {
    set_error("null argument");
    return MQ_ERR_CONFIG;
  }
  cfg->map.set(key, value);
  return MQ_OK;
}

int mq_config_get(const mq_config* cfg, const char* key, char* buf,
                  size_t buflen) {
  if (!cfg || !key || !buf || buflen == 0) {
    set_error("null argument");
    return MQ_ERR_CONFIG;
  }
  if (!cfg->map.has(key)) {
    set_error(std::string("missing config key '") + key + "'");
    return MQ_ERR_CONFIG;
  }
  const std::string v = cfg->map.get_str(key, "");
  std::snprintf(buf, buflen, "%s", v.c_str());
  return MQ_OK;
}

void mq_config_free(mq_config* cfg) { delete cfg; }

}  // extern "C"

namespace {

// constructed initial data + full integration + run directory
int simulate_impl(const ConfigMap& cm, const std::string& out_dir) {
  const auto wall0 = std::chrono::steady_clock::now();
  const ModelParams mp = model_from_config(cm);
  const RunConfig rc = runconfig_from_config(cm);
  const RadialGrid grid = grid_from_config(cm);
  const ShrinkParams sp = shrink_from_config(cm, mp);
  const InitialDataParams d = initdata_from_config(cm, mp.dim);

  const Field U0 = build_initial_U(grid, d, sp, mp);
  const double theta0 = theta0_fixed_point(U0, mp);
  const Field u0 = u0_from_U0(U0, theta0, mp);

  SolutionTrace trace = run_to_quench(u0, mp, rc);

  QuenchEstimate est;
  bool have_est = false;
  if (trace.status == RunStatus::quenched) {
    est = estimate_quench_time(trace, mp, rc);
    have_est = true;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  RunPaths rp{out_dir};
  write_run_dir(rp, cm, mp, rc, trace, have_est ? &est : nullptr, elapsed);
  // resolved shrink parameters, for the transform/verify stages
  append_manifest(rp.manifest(),
                  {{"shrink.T", fmt17(sp.T)},
                   {"shrink.K0", fmt17(sp.K0)},
                   {"shrink.A", fmt17(sp.A)},
                   {"shrink.M0", fmt17(sp.M0)},
                   {"shrink.alpha0", fmt17(sp.alpha0)},
                   {"shrink.eps0", fmt17(sp.eps0)},
                   {"shrink.delta0", fmt17(sp.delta0)},
                   {"shrink.C0", fmt17(sp.C0)},
                   {"shrink.eta0", fmt17(sp.eta0)},
                   {"initial.theta0", fmt17(theta0)}});
  switch (trace.status) {
    case RunStatus::quenched: return MQ_OK;
    case RunStatus::aborted_nan:
      set_error("solver aborted on a non-finite state");
      return MQ_ERR_NAN;
    case RunStatus::max_steps:
      set_error("max_steps exhausted before quench");
      return MQ_ERR_MAX_STEPS;
    default:
      set_error("unexpected run status");
      return MQ_ERR;
  }
}

ShrinkParams shrink_from_run(const mq_run* run) {
  ConfigMap cm = run->lr.config;
  // prefer the resolved values recorded at simulate time
  for (const char* k : {"T", "K0", "A", "M0", "alpha0", "eps0", "delta0",
                        "C0", "eta0"}) {
    const std::string key = std::string("shrink.") + k;
    auto it = run->lr.manifest.find(key);
    if (it != run->lr.manifest.end())
      cm.set(k == std::string("T") ? "T_horizon" : k, it->second);
  }
  return shrink_from_config(cm, run->lr.mp);
}

std::size_t nearest_snapshot(const SolutionTrace& tr, double t) {
  std::size_t best = 0;
  double dist = 1e300;
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    const double d = std::fabs(tr.snapshots[i].time - t);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

SelfSimFrame frame_at(const mq_run* run, std::size_t i, double T,
                      const ShrinkParams& sp) {
  const auto& tr = run->lr.trace;
  const Field& u = tr.snapshots[i];
  const double theta = tr.snapshot_theta[i];
  const Field U = ubar_to_U(u_to_ubar(u), theta, run->lr.mp);
  return to_selfsim(U, u.time, T, sp.M0, theta, run->lr.mp);
}

void write_components_record(const std::string& prefix,
                             const SpectralComponents& c,
                             const ComponentNorms& nn, int n) {
  std::ostringstream os;
  os << "s = " << fmt17(c.s) << "\n";
  os << "K0 = " << fmt17(c.K0) << "\n";
  os << "n = " << n << "\n";
  os << "q0 = " << fmt17(c.q0) << "\n";
  for (int i = 0; i < n; ++i)
    os << "q1_" << i << " = " << fmt17(c.q1[i]) << "\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      os << "q2_" << i << j << " = " << fmt17(c.q2[i][j]) << "\n";
  os << "norm.q0 = " << fmt17(nn.a_q0) << "\n";
  os << "norm.q1 = " << fmt17(nn.a_q1) << "\n";
  os << "norm.q2 = " << fmt17(nn.a_q2) << "\n";
  os << "norm.q_minus = " << fmt17(nn.a_qminus) << "\n";
  os << "norm.q_e = " << fmt17(nn.a_qe) << "\n";
  os << "norm.grad_perp = " << fmt17(nn.a_gradperp) << "\n";
  os << "file.q_minus = " << prefix << "_qminus.csv\n";
  os << "file.q_e = " << prefix << "_qe.csv\n";
  write_text_atomic(prefix + "_components.txt", os.str());
  write_text_atomic(prefix + "_qminus.csv",
                    field_csv(c.q_minus, "y", "q_minus"));
  write_text_atomic(prefix + "_qe.csv", field_csv(c.q_e, "y", "q_e"));
}

int transform_impl(const mq_run* run, double t, const std::string& prefix,
                   bool frame_too) {
  if (!run->lr.has_estimate) {
    set_error("run has no quench estimate; transform needs a quenched run");
    return MQ_ERR_CONFIG;
  }
  if (run->lr.trace.snapshots.empty()) {
    set_error("run has no snapshots");
    return MQ_ERR_CONFIG;
  }
  const ShrinkParams sp = shrink_from_run(run);
  const double T = run->lr.est.T_hat;
  const std::size_t i = nearest_snapshot(run->lr.trace, t);
  if (run->lr.trace.snapshots[i].time >= T) {
    set_error("snapshot at or beyond the fitted quench time");
    return MQ_ERR_CONFIG;
  }
  const SelfSimFrame f = frame_at(run, i, T, sp);
  if (frame_too) {
    std::ostringstream os;
    os << "y,W,w,q\n";
    for (std::size_t j = 0; j < f.ygrid.nodes.size(); ++j)
      os << fmt17(f.ygrid.nodes[j]) << ',' << fmt17(f.W[j]) << ','
         << fmt17(f.w[j]) << ',' << fmt17(f.q[j]) << '\n';
    write_text_atomic(prefix + "_frame.csv", os.str());
  }
  const HermiteBasis basis = build_basis(run->lr.mp.dim, 4);
  Field q(share(f.ygrid), f.s);
  q.values = f.q;
  const SpectralComponents comps = decompose(q, f.s, sp.K0, basis);
  const ComponentNorms nn = component_norms(comps, basis);
  write_components_record(prefix, comps, nn, run->lr.mp.dim);
  return MQ_OK;
}

int verify_impl(const std::string& run_dir) {
  LoadedRun lr = load_run_dir(run_dir);
  if (lr.trace.status != RunStatus::quenched) {
    set_error("verify requires a quenched run");
    return MQ_ERR_CONFIG;
  }
  const ModelParams& mp = lr.mp;
  const RunConfig& rc = lr.rc;
  ConfigMap cm = lr.config;
  mq_run tmp{std::move(lr), run_dir};
  const ShrinkParams sp = shrink_from_run(&tmp);
  LoadedRun& L = tmp.lr;

  const QuenchEstimate est = estimate_quench_time(L.trace, mp, rc);
  bool hard_fail = false;
  std::map<std::string, std::string> out;

  // rate slope against the flat power law
  const double P = mp.p_exp + 1.0;
  const RateSlope rs =
      center_rate_slope(L.trace, est.T_hat, 3.0 * rc.quench_stop,
                        10.0 * std::sqrt(rc.quench_stop));
  out["verify.rate_slope"] = fmt17(rs.slope);
  out["verify.rate_decades"] = fmt17(rs.decades);
  if (std::fabs(rs.slope - 1.0 / P) > 0.03) hard_fail = true;

  // theta discipline
  const ThetaReport th = theta_bounds_report(L.trace.theta, est.T_hat, mp);
  out["verify.theta_min"] = fmt17(th.theta_min);
  out["verify.theta_max"] = fmt17(th.theta_max);
  out["verify.theta_T"] = fmt17(th.theta_T);
  out["verify.theta_tail_width"] = fmt17(th.tail_width);
  out["verify.theta_scaled_prime_max"] = fmt17(th.scaled_prime_max);
  if (!th.theta_ge_1) hard_fail = true;

  // frames late in the run: profile error, component trends, membership
  const HermiteBasis basis = build_basis(mp.dim, 4);
  std::vector<std::pair<double, SpectralComponents>> series;
  std::ostringstream eos, mos;
  eos << "s,E\n";
  mos << "t,P1_pass,P2_pass,P3_pass,min_margin\n";
  double E_first = -1.0, E_max = 0.0;
  for (std::size_t i = 0; i < L.trace.snapshots.size(); ++i) {
    const double t = L.trace.snapshots[i].time;
    if (!(t < est.T_hat)) continue;
    const double omc = 1.0 - eval_radial(L.trace.snapshots[i], 0.0);
    if (omc > 10.0 * rc.quench_stop) continue;  // final decade only
    const ProfilePoint pt = intermediate_profile_error(
        L.trace, i, est, est.theta_star_hat, mp, rc);
    eos << fmt17(pt.s) << ',' << fmt17(pt.scaled) << '\n';
    if (E_first < 0.0) E_first = pt.scaled;
    E_max = std::max(E_max, pt.scaled);
    const SelfSimFrame f = frame_at(&tmp, i, est.T_hat, sp);
    Field q(share(f.ygrid), f.s);
    q.values = f.q;
    SpectralComponents comps = decompose(q, f.s, sp.K0, basis);
    if (series.empty() || f.s - series.back().first >= 0.05)
      series.emplace_back(f.s, comps);
    const RegionReport rr =
        check_membership(L.trace, t, est.T_hat, sp, comps, basis, mp);
    mos << fmt17(t) << ',' << rr.p1_pass << ',' << rr.p2_pass << ','
        << rr.p3_pass << ',' << fmt17(rr.min_margin) << '\n';
  }
  write_text_atomic(run_dir + "/profile_E.csv", eos.str());
  write_text_atomic(run_dir + "/membership.csv", mos.str());
  out["verify.E_first"] = fmt17(E_first);
  out["verify.E_max"] = fmt17(E_max);

  // reconstruction sanity on the last frame: chi q = low + q_minus nodewise
  if (!series.empty()) {
    const auto& c = series.back().second;
    double recon_err = 0.0;
    for (std::size_t j = 0; j < c.q_minus.size(); ++j) {
      const double y = c.q_minus.grid->nodes[j];
      const double chi_r = c.r_input[j] - c.q_e[j];
      const double recon = reconstruct_low(c, y) + c.q_minus[j];
      recon_err = std::max(recon_err, std::fabs(chi_r - recon));
    }
    out["verify.reconstruction_err"] = fmt17(recon_err);
    if (recon_err > 1e-8) hard_fail = true;
  }

  if (series.size() >= 5) {
    const OdeTrendReport tr = ode_trend_q012(series, sp.A);
    std::ostringstream os;
    os << "s,r0_scaled,r1_scaled,r2_scaled\n";
    for (std::size_t i = 0; i < tr.s.size(); ++i)
      os << fmt17(tr.s[i]) << ',' << fmt17(tr.r0_scaled[i]) << ','
         << fmt17(tr.r1_scaled[i]) << ',' << fmt17(tr.r2_scaled[i]) << '\n';
    write_text_atomic(run_dir + "/ode_trend.csv", os.str());
    out["verify.ode_r0_max"] = fmt17(tr.max_r0);
    out["verify.ode_r1_max"] = fmt17(tr.max_r1);
    out["verify.ode_r2_max"] = fmt17(tr.max_r2);
  }

  // final profile ratios over the admissible band
  try {
    const double tau_last =
        std::max(est.T_hat - L.trace.final_field().time, 1e-30);
    const double x_lo =
        0.25 * sp.K0 *
        std::sqrt(tau_last * std::fabs(std::log(tau_last)));
    const auto ratios = final_profile_ratio(
        L.trace.final_field(), est.theta_star_hat, x_lo, sp.eps0, mp);
    std::ostringstream os;
    os << "x,ratio\n";
    for (const auto& [x, r] : ratios) os << fmt17(x) << ',' << fmt17(r) << '\n';
    write_text_atomic(run_dir + "/final_ratio.csv", os.str());
    double mean = 0.0;
    long cnt = 0;
    const double decade_hi = ratios.front().first * 10.0;
    for (const auto& [x, r] : ratios)
      if (x <= decade_hi) {
        mean += r;
        ++cnt;
      }
    if (cnt > 0) out["verify.final_decade_mean"] = fmt17(mean / cnt);
  } catch (const std::exception& e) {
    out["verify.final_ratio_error"] = e.what();
  }

  out["verify.T_hat"] = fmt17(est.T_hat);
  out["verify.theta_star_hat"] = fmt17(est.theta_star_hat);
  out["verify.pass"] = hard_fail ? "0" : "1";
  append_manifest(run_dir + "/manifest.txt", out);
  if (hard_fail) {
    set_error("hard verification invariant failed");
    return MQ_ERR_VERIFY;
  }
  return MQ_OK;
}

struct SweepJob {
  std::string name;
  std::vector<std::pair<std::string, std::string>> overrides;
  int code = -1;
  std::string dir;
};

int sweep_impl(const ConfigMap& base, const std::string& overrides,
               const std::string& out_dir) {
  // grammar: whitespace-separated tokens `key=v1,v2,...`
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::istringstream ss(overrides);
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("sweep override must be key=v1,v2,...: " + tok);
    std::vector<std::string> vals;
    std::istringstream vs(tok.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) vals.push_back(v);
    if (vals.empty())
      throw std::invalid_argument("sweep override with no values: " + tok);
    axes.emplace_back(tok.substr(0, eq), vals);
  }
  std::vector<SweepJob> jobs;
  std::vector<std::size_t> idx(axes.size(), 0);
  bool done = false;
  while (!done) {
    SweepJob j;
    for (std::size_t a = 0; a < axes.size(); ++a)
      j.overrides.emplace_back(axes[a].first, axes[a].second[idx[a]]);
    char name[32];
    std::snprintf(name, sizeof name, "run_%04zu", jobs.size());
    j.name = name;
    j.dir = out_dir + "/" + name;
    jobs.push_back(std::move(j));
    if (axes.empty()) break;
    std::size_t a = axes.size() - 1;
    while (true) {
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) {
        done = true;
        break;
      }
      --a;
    }
  }

  ensure_dir(out_dir);
  const RunConfig base_rc = runconfig_from_config(base);
  int pool = base_rc.workers > 0
                 ? base_rc.workers
                 : static_cast<int>(std::thread::hardware_concurrency());
  if (pool < 1) pool = 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      ConfigMap cm = base;
      for (const auto& [k, v] : jobs[i].overrides) cm.set(k, v);
      try {
        jobs[i].code = simulate_impl(cm, jobs[i].dir);
      } catch (const std::exception& e) {
        jobs[i].code = MQ_ERR;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  // aggregate, assembled single-threaded after all runs complete
  std::ostringstream os;
  os << "run,dir";
  for (const auto& [k, _] : axes) os << ',' << k;
  os << ",status,T_hat,theta_star_hat\n";
  bool any_ok = false, any_nan = false;
  for (const auto& j : jobs) {
    os << j.name << ',' << j.name;
    for (const auto& [_, v] : j.overrides) os << ',' << v;
    std::string status = "error", T = "nan", th = "nan";
    try {
      const auto man = read_manifest(j.dir + "/manifest.txt");
      if (man.count("run.status")) status = man.at("run.status");
      if (man.count("estimate.T_hat")) T = man.at("estimate.T_hat");
      if (man.count("estimate.theta_star_hat"))
        th = man.at("estimate.theta_star_hat");
    } catch (const std::exception&) {
    }
    os << ',' << status << ',' << T << ',' << th << '\n';
    if (j.code == MQ_OK) any_ok = true;
    if (j.code == MQ_ERR_NAN) any_nan = true;
  }
  write_text_atomic(out_dir + "/aggregate.csv", os.str());
  if (any_nan) {
    set_error("a sweep run aborted on a non-finite state");
    return MQ_ERR_NAN;
  }
  if (!any_ok) {
    set_error("no sweep run succeeded");
    return MQ_ERR;
  }
  return MQ_OK;
}

}  // namespace

extern "C" {

int mq_simulate(const mq_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) {
    set_error("null argument");
    return MQ_ERR_CONFIG;
  }
  return guard([&] { return simulate_impl(cfg->map, out_dir); });
}

mq_run* mq_run_open(const char* run_dir) {
  try {
    auto* r = new mq_run;
    r->dir = run_dir;
    r->lr = load_run_dir(run_dir);
    return r;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void mq_run_free(mq_run* run) { delete run; }

const char* mq_run_status(const mq_run* run) {
  return run ? to_string(run->lr.trace.status) : "null";
}

double mq_run_quench_time(const mq_run* run) {
  return run && run->lr.has_estimate ? run->lr.est.T_hat
                                     : std::nan("");
}

double mq_run_theta_star(const mq_run* run) {
  return run && run->lr.has_estimate ? run->lr.est.theta_star_hat
                                     : std::nan("");
}

int mq_transform(const mq_run* run, double t, const char* out_prefix) {
  if (!run || !out_prefix) {
    set_error("null argument");
    return MQ_ERR_CONFIG;
  }
  return guard([&] { return transform_impl(run, t, out_prefix, true); });
}

int mq_decompose(const mq_run* run, double t, const char* out_prefix) {
  if (!run || !out_prefix) {
    set_error("null argument");
    return MQ_ERR_CONFIG;
  }
  return guard([&] { return transform_impl(run, t, out_prefix, false); });
}

int mq_verify(const char* run_dir) {
  if (!run_dir) {
    set_error("null argument");
    return MQ_ERR_CONFIG;
  }
  return guard([&] { return verify_impl(run_dir); });
}

int mq_gamma_map(const mq_config* cfg, double d0, const double* d1, int n,
                 double* q0_out, double* q1_out) {
  if (!cfg || !q0_out) {
    set_error("null argument");
    return MQ_ERR_CONFIG;
  }
  return guard([&] {
    const ModelParams mp = model_from_config(cfg->map);
    if (n != mp.dim) {
      set_error("gamma_map: d1 length must equal dim");
      return MQ_ERR_CONFIG;
    }
    const ShrinkParams sp = shrink_from_config(cfg->map, mp);
    InitialDataParams d;
    d.d0 = d0;
    for (int i = 0; i < n; ++i) d.d1[i] = d1 ? d1[i] : 0.0;
    const HermiteBasis basis = build_basis(mp.dim, 4);
    const GammaResult g = gamma_map(d, sp, mp, basis);
    *q0_out = g.q0;
    if (q1_out)
      for (int i = 0; i < n; ++i) q1_out[i] = g.q1[i];
    return MQ_OK;
  });
}

int mq_sweep(const mq_config* cfg, const char* overrides,
             const char* out_dir) {
  if (!cfg || !overrides || !out_dir) {
    set_error("null argument");
    return MQ_ERR_CONFIG;
  }
  return guard([&] { return sweep_impl(cfg->map, overrides, out_dir); });
}

}  // extern "C"
