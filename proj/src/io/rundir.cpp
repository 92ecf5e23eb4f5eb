#include "io/rundir.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "io/format.hpp"

namespace fs = std::filesystem;

namespace mq {

namespace {
constexpr const char* kArtifactVersion = "mqlab-0.1.0";
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path);
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("short write on " + tmp);
  }
  fs::rename(tmp, path);
}

void write_manifest_atomic(const std::string& path,
                           const std::map<std::string, std::string>& kv) {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  write_text_atomic(path, os.str());
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open manifest " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string k = line.substr(0, eq);
    std::string v = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
    };
    strip(k);
    strip(v);
    kv[k] = v;
  }
  return kv;
}

void append_manifest(const std::string& path,
                     const std::map<std::string, std::string>& extra) {
  auto kv = read_manifest(path);
  for (const auto& [k, v] : extra) kv[k] = v;
  write_manifest_atomic(path, kv);
}

std::string field_csv(const Field& f, const char* col0, const char* col1) {
  std::ostringstream os;
  os << col0 << ',' << col1 << '\n';
  for (std::size_t j = 0; j < f.size(); ++j)
    os << fmt17(f.grid->nodes[j]) << ',' << fmt17(f.values[j]) << '\n';
  return os.str();
}

void write_run_dir(const RunPaths& rp, const ConfigMap& config,
                   const ModelParams& mp, const RunConfig& rc,
                   const SolutionTrace& trace, const QuenchEstimate* est,
                   double elapsed_seconds) {
  ensure_dir(rp.dir);
  ensure_dir(rp.dir + "/snapshots");

  std::map<std::string, std::string> man;
  man["artifact_version"] = kArtifactVersion;
  for (const auto& [k, v] : config.items()) man["config." + k] = v;
  man["params.lambda"] = fmt17(mp.lambda);
  man["params.gamma"] = fmt17(mp.gamma);
  man["params.p_exp"] = fmt17(mp.p_exp);
  man["params.q_exp"] = fmt17(mp.q_exp);
  man["params.dim"] = std::to_string(mp.dim);
  man["params.radius"] = fmt17(mp.radius);
  man["run.status"] = to_string(trace.status);
  man["run.steps"] = std::to_string(trace.steps);
  man["run.t_end"] = fmt17(trace.t_end);
  man["run.argmax_node"] = std::to_string(trace.argmax_node);
  man["run.argmax_radius"] =
      fmt17(trace.final_field().grid->nodes[trace.argmax_node]);
  man["run.snapshot_count"] = std::to_string(trace.snapshots.size());
  if (est) {
    man["estimate.T_hat"] = fmt17(est->T_hat);
    man["estimate.theta_star_hat"] = fmt17(est->theta_star_hat);
    man["estimate.fit_window_lo"] = fmt17(est->fit_window_lo);
    man["estimate.fit_window_hi"] = fmt17(est->fit_window_hi);
    man["estimate.fit_residual"] = fmt17(est->fit_residual);
    man["estimate.samples_used"] = std::to_string(est->samples_used);
  }

  {  // center series
    std::ostringstream os;
    os << "t,one_minus_u_center\n";
    for (const auto& [t, v] : trace.center)
      os << fmt17(t) << ',' << fmt17(v) << '\n';
    write_text_atomic(rp.dir + "/center.csv", os.str());
    man["file.center"] = "center.csv";
  }
  {  // theta trace (with filled derivative column)
    const ThetaTrace filled = trace.theta.samples.size() >= 2
                                  ? finite_diff_theta_prime(trace.theta)
                                  : trace.theta;
    write_text_atomic(rp.dir + "/theta.csv", filled.to_csv());
    man["file.theta"] = "theta.csv";
  }
  {  // snapshots + per-snapshot metadata
    std::ostringstream idx;
    idx << "index,t,theta,file\n";
    for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/snap_%05zu.csv", i);
      write_text_atomic(rp.dir + "/" + name,
                        field_csv(trace.snapshots[i], "r", "u"));
      idx << i << ',' << fmt17(trace.snapshots[i].time) << ','
          << fmt17(trace.snapshot_theta[i]) << ',' << name << '\n';
    }
    write_text_atomic(rp.dir + "/snapshots/index.csv", idx.str());
    man["file.snapshot_index"] = "snapshots/index.csv";
  }
  write_manifest_atomic(rp.manifest(), man);
  {
    std::ostringstream os;
    os << "elapsed_seconds = " << elapsed_seconds << "\n";
    write_text_atomic(rp.timings(), os.str());
  }
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(tok);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

LoadedRun load_run_dir(const std::string& dir) {
  LoadedRun lr;
  lr.manifest = read_manifest(dir + "/manifest.txt");
  // rebuild the config from its echo
  for (const auto& [k, v] : lr.manifest)
    if (k.rfind("config.", 0) == 0) lr.config.set(k.substr(7), v);
  lr.mp = model_from_config(lr.config);
  lr.rc = runconfig_from_config(lr.config);

  const auto idx = read_csv(dir + "/snapshots/index.csv");
  GridPtr grid;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    const auto rows = read_csv(dir + "/" + idx[i][3]);
    RadialGrid g;
    std::vector<double> vals;
    for (std::size_t j = 1; j < rows.size(); ++j) {
      g.nodes.push_back(std::stod(rows[j][0]));
      vals.push_back(std::stod(rows[j][1]));
    }
    if (!grid) grid = share(std::move(g));
    Field f(grid, std::stod(idx[i][1]));
    f.values = std::move(vals);
    lr.trace.snapshots.push_back(std::move(f));
    lr.trace.snapshot_theta.push_back(std::stod(idx[i][2]));
  }
  for (const auto& row : read_csv(dir + "/center.csv"))
    if (row[0] != "t") lr.trace.center.emplace_back(std::stod(row[0]), std::stod(row[1]));
  for (const auto& row : read_csv(dir + "/theta.csv"))
    if (row[0] != "t")
      lr.trace.theta.push(std::stod(row[0]), std::stod(row[1]), std::stod(row[2]));

  const std::string status = lr.manifest.count("run.status") ? lr.manifest["run.status"] : "";
  lr.trace.status = status == "quenched"    ? RunStatus::quenched
                    : status == "max_steps" ? RunStatus::max_steps
                    : status == "aborted_nan" ? RunStatus::aborted_nan
                                              : RunStatus::running;
  if (lr.manifest.count("run.steps"))
    lr.trace.steps = std::stol(lr.manifest["run.steps"]);
  if (lr.manifest.count("run.t_end"))
    lr.trace.t_end = std::stod(lr.manifest["run.t_end"]);
  if (lr.manifest.count("run.argmax_node"))
    lr.trace.argmax_node = std::stoi(lr.manifest["run.argmax_node"]);
  if (lr.manifest.count("estimate.T_hat")) {
    lr.has_estimate = true;
    lr.est.T_hat = std::stod(lr.manifest["estimate.T_hat"]);
    lr.est.theta_star_hat = std::stod(lr.manifest["estimate.theta_star_hat"]);
    lr.est.fit_window_lo = std::stod(lr.manifest["estimate.fit_window_lo"]);
    lr.est.fit_window_hi = std::stod(lr.manifest["estimate.fit_window_hi"]);
    lr.est.fit_residual = std::stod(lr.manifest["estimate.fit_residual"]);
    lr.est.samples_used = std::stol(lr.manifest["estimate.samples_used"]);
  }
  return lr;
}

}  // namespace mq
