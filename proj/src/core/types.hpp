#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mq {

// Physical parameters of the touch-down model on the ball |x| < radius.
struct ModelParams {
  double lambda = 1.0;  // source strength, > 0
  double gamma = 0.0;   // nonlocal coupling, >= 0
  double p_exp = 2.0;   // singular exponent
  double q_exp = 2.0;   // nonlocal exponent
  int dim = 1;          // space dimension n >= 1
  double radius = 1.0;  // ball radius R > 0

  // Throws std::invalid_argument on violated constraints.
  // general_mode additionally enforces dim - 2/(p_exp+1) > 0.
  void validate(bool general_mode = false) const;
};

// Volume of the n-ball of radius R (n=1: the interval (-R, R)).
double ball_volume(const ModelParams& mp);

// Surface measure of the unit (n-1)-sphere; omega_0 = 2 so that the n=1
// radial integral counts both half-lines of the symmetric interval.
double sphere_measure(int n);

// Strictly increasing radii r_0 = 0 ... r_M = R.
struct RadialGrid {
  std::vector<double> nodes;

  int intervals() const { return static_cast<int>(nodes.size()) - 1; }
  double rmax() const { return nodes.back(); }
  double min_spacing() const;
  void validate() const;
};

// nodes r_j = R*(j/M)^cluster; cluster = 1 is the uniform grid.
RadialGrid make_graded_grid(int M, double R, double cluster);

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr share(RadialGrid g);

// Values of a scalar function on a radial grid at one time instant.
struct Field {
  GridPtr grid;
  std::vector<double> values;
  double time = 0.0;

  Field() = default;
  Field(GridPtr g, double t = 0.0)
      : grid(std::move(g)), values(grid->nodes.size(), 0.0), time(t) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  void validate() const;  // finite values, length matches grid
};

// Solver knobs shared by every run.
struct RunConfig {
  double cfl_safety = 0.2;
  double source_safety = 0.1;
  double quench_stop = 1e-3;  // stop once 1 - max u < quench_stop
  long max_steps = 200000000L;
  long output_cadence = 2000;  // snapshot every this many accepted steps
  bool diffusion_enabled = true;
  std::uint64_t seed = 1;
  int workers = 0;  // sweep pool size; 0 = hardware concurrency
  // Extra times at which the integrator lands exactly and snapshots.
  std::vector<double> snapshot_times;

  void validate() const;
};

// Central difference of v on the grid (one-sided at the ends); second order
// on smooth nonuniform grids.
std::vector<double> grid_gradient(const RadialGrid& g,
                                  const std::vector<double>& v);

}  // namespace mq
