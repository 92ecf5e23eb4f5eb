#pragma once

#include <map>
#include <string>
#include <vector>

#include "io/config.hpp"
#include "regions/regions.hpp"
#include "solver/solver.hpp"
#include "verify/verify.hpp"

namespace mq {

// A run directory holds:
//   manifest.txt        flat key = value record (written atomically)
//   timings.txt         wall-clock figures (kept apart so manifests are
//                       byte-identical across repeated runs)
//   theta.csv           t,mu,theta,theta_prime
//   center.csv          t,one_minus_u_center
//   snapshots/snap_NNNN.csv   r,u per stored time
//   membership.csv      t,P1_pass,P2_pass,P3_pass,min_margin (verify)
struct RunPaths {
  std::string dir;
  std::string manifest() const { return dir + "/manifest.txt"; }
  std::string timings() const { return dir + "/timings.txt"; }
};

void ensure_dir(const std::string& path);

// key = value lines, sorted by key; temp-then-rename.
void write_manifest_atomic(const std::string& path,
                           const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> read_manifest(const std::string& path);

void write_text_atomic(const std::string& path, const std::string& text);

std::string field_csv(const Field& f, const char* col0, const char* col1);

// Full run directory from a completed trace.
void write_run_dir(const RunPaths& rp, const ConfigMap& config,
                   const ModelParams& mp, const RunConfig& rc,
                   const SolutionTrace& trace, const QuenchEstimate* est,
                   double elapsed_seconds);

// Rebuild the trace (snapshots, center, theta) from a run directory.
struct LoadedRun {
  ConfigMap config;
  ModelParams mp;
  RunConfig rc;
  SolutionTrace trace;
  std::map<std::string, std::string> manifest;
  bool has_estimate = false;
  QuenchEstimate est;
};
LoadedRun load_run_dir(const std::string& dir);

// Appends verify-stage results into the manifest (atomic rewrite).
void append_manifest(const std::string& path,
                     const std::map<std::string, std::string>& extra);

}  // namespace mq
