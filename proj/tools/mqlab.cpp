// Command-line front end; everything goes through the shared C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mems_quench.h"

namespace {

int fail(int code) {
  std::fprintf(stderr, "error: %s\n", mq_last_error());
  return code;
}

struct ConfigHandle {
  mq_config* cfg = nullptr;
  ~ConfigHandle() { mq_config_free(cfg); }
};

struct RunHandle {
  mq_run* run = nullptr;
  ~RunHandle() { mq_run_free(run); }
};

int cmd_report(const std::string& run_dir) {
  RunHandle rh;
  rh.run = mq_run_open(run_dir.c_str());
  if (!rh.run) return fail(2);
  std::printf("status         %s\n", mq_run_status(rh.run));
  std::printf("T_hat          %.17g\n", mq_run_quench_time(rh.run));
  std::printf("theta_star_hat %.17g\n", mq_run_theta_star(rh.run));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal MEMS touch-down laboratory"};
  app.require_subcommand(1);

  std::string config_path, run_dir, out_dir, overrides, set_expr;
  double t = 0.0, d0 = 0.0;
  std::vector<double> d1;
  std::vector<std::string> sets;

  auto* sim = app.add_subcommand("simulate", "integrate a run to quench");
  sim->add_option("config", config_path)->required();
  sim->add_option("--out", out_dir)->default_val("run");
  sim->add_option("--set", sets, "extra key=value overrides");

  auto* tra = app.add_subcommand("transform", "similarity frame at a time");
  tra->add_option("run_dir", run_dir)->required();
  tra->add_option("--t", t)->required();

  auto* dec = app.add_subcommand("decompose", "spectral components at a time");
  dec->add_option("run_dir", run_dir)->required();
  dec->add_option("--t", t)->required();

  auto* ver = app.add_subcommand("verify", "theorem diagnostics on a run");
  ver->add_option("run_dir", run_dir)->required();

  auto* gam = app.add_subcommand("gamma-map", "initial-data handle (q0,q1)");
  gam->add_option("config", config_path)->required();
  gam->add_option("--d0", d0)->default_val(0.0);
  gam->add_option("--d1", d1);

  auto* swp = app.add_subcommand("sweep", "cartesian parameter sweep");
  swp->add_option("config", config_path)->required();
  swp->add_option("--set", sets, "axes like gamma=0,0.1")->required();
  swp->add_option("--out", out_dir)->default_val("sweep");

  auto* rep = app.add_subcommand("report", "print run summary");
  rep->add_option("run_dir", run_dir)->required();

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed() || gam->parsed() || swp->parsed()) {
    ConfigHandle ch;
    ch.cfg = mq_config_load(config_path.c_str());
    if (!ch.cfg) return fail(2);
    for (const auto& s : sets) {
      if (swp->parsed()) continue;  // sweep consumes --set as axes
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: bad --set '%s'\n", s.c_str());
        return 2;
      }
      mq_config_set(ch.cfg, s.substr(0, eq).c_str(), s.substr(eq + 1).c_str());
    }
    if (sim->parsed()) {
      const int rc = mq_simulate(ch.cfg, out_dir.c_str());
      if (rc != 0) return fail(rc);
      return cmd_report(out_dir);
    }
    if (gam->parsed()) {
      double q0 = 0.0, q1[3] = {0, 0, 0};
      while (d1.size() < 3) d1.push_back(0.0);
      char dim_buf[16] = "1";
      mq_config_get(ch.cfg, "dim", dim_buf, sizeof dim_buf);
      const int n = std::max(1, std::min(3, std::atoi(dim_buf)));
      const int rc = mq_gamma_map(ch.cfg, d0, d1.data(), n, &q0, q1);
      if (rc != 0) return fail(rc);
      std::printf("q0 = %.17g\n", q0);
      for (int i = 0; i < n; ++i) std::printf("q1_%d = %.17g\n", i, q1[i]);
      return 0;
    }
    if (swp->parsed()) {
      std::string ov;
      for (const auto& s : sets) {
        if (!ov.empty()) ov += ' ';
        ov += s;
      }
      const int rc = mq_sweep(ch.cfg, ov.c_str(), out_dir.c_str());
      if (rc != 0) return fail(rc);
      std::printf("aggregate written to %s/aggregate.csv\n", out_dir.c_str());
      return 0;
    }
  }

  if (tra->parsed() || dec->parsed()) {
    RunHandle rh;
    rh.run = mq_run_open(run_dir.c_str());
    if (!rh.run) return fail(2);
    char prefix[512];
    std::snprintf(prefix, sizeof prefix, "%s/t_%.6f", run_dir.c_str(), t);
    const int rc = tra->parsed() ? mq_transform(rh.run, t, prefix)
                                 : mq_decompose(rh.run, t, prefix);
    if (rc != 0) return fail(rc);
    std::printf("wrote %s_*\n", prefix);
    return 0;
  }

  if (ver->parsed()) {
    const int rc = mq_verify(run_dir.c_str());
    if (rc != 0) return fail(rc);
    std::printf("verify: pass\n");
    return 0;
  }

  if (rep->parsed()) return cmd_report(run_dir);
  return 2;
}
