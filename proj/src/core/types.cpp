#include "core/types.hpp"

#include <cmath>
#include <numbers>

namespace mq {

void ModelParams::validate(bool general_mode) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(p_exp > 0.0)) throw std::invalid_argument("p_exp must be > 0");
  if (!(q_exp > 0.0)) throw std::invalid_argument("q_exp must be > 0");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  if (general_mode && !(dim - 2.0 / (p_exp + 1.0) > 0.0))
    throw std::invalid_argument("need dim - 2/(p_exp+1) > 0");
}

double sphere_measure(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (n == 1) return 2.0;
  // omega_{n-1} = 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(const ModelParams& mp) {
  mp.validate();
  const double n = mp.dim;
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) *
         std::pow(mp.radius, n);
}

double RadialGrid::min_spacing() const {
  double h = nodes[1] - nodes[0];
  for (std::size_t j = 2; j < nodes.size(); ++j)
    h = std::min(h, nodes[j] - nodes[j - 1]);
  return h;
}

void RadialGrid::validate() const {
  if (nodes.size() < 17)
    throw std::invalid_argument("radial grid needs at least 16 intervals");
  if (nodes.front() != 0.0)
    throw std::invalid_argument("first grid node must be exactly 0");
  if (!(nodes.back() > 0.0))
    throw std::invalid_argument("last grid node must be positive");
  for (std::size_t j = 1; j < nodes.size(); ++j)
    if (!(nodes[j] > nodes[j - 1]))
      throw std::invalid_argument("grid nodes must be strictly increasing");
}

RadialGrid make_graded_grid(int M, double R, double cluster) {
  if (M < 16) throw std::invalid_argument("make_graded_grid: M must be >= 16");
  if (!(R > 0.0)) throw std::invalid_argument("make_graded_grid: R must be > 0");
  if (!(cluster >= 1.0))
    throw std::invalid_argument("make_graded_grid: cluster must be >= 1");
  RadialGrid g;
  g.nodes.resize(M + 1);
  for (int j = 0; j <= M; ++j)
    g.nodes[j] = R * std::pow(static_cast<double>(j) / M, cluster);
  g.nodes[0] = 0.0;
  g.nodes[M] = R;
  g.validate();
  return g;
}

GridPtr share(RadialGrid g) {
  return std::make_shared<const RadialGrid>(std::move(g));
}

void Field::validate() const {
  if (!grid) throw std::invalid_argument("field has no grid");
  if (values.size() != grid->nodes.size())
    throw std::invalid_argument("field length does not match grid");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("field contains a non-finite value");
}

void RunConfig::validate() const {
  if (!(cfl_safety > 0.0) || !(source_safety > 0.0))
    throw std::invalid_argument("safety factors must be positive");
  if (!(quench_stop > 0.0 && quench_stop <= 0.1))
    throw std::invalid_argument("quench_stop must lie in (0, 0.1]");
  if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
  if (output_cadence <= 0)
    throw std::invalid_argument("output_cadence must be positive");
}

std::vector<double> grid_gradient(const RadialGrid& g,
                                  const std::vector<double>& v) {
  const std::size_t m = v.size();
  if (m != g.nodes.size() || m < 3)
    throw std::invalid_argument("grid_gradient: bad sizes");
  std::vector<double> dv(m);
  const auto& r = g.nodes;
  for (std::size_t j = 1; j + 1 < m; ++j) {
    const double hm = r[j] - r[j - 1], hp = r[j + 1] - r[j];
    dv[j] = (hm * hm * v[j + 1] + (hp * hp - hm * hm) * v[j] -
             hp * hp * v[j - 1]) /
            (hm * hp * (hm + hp));
  }
  {  // one-sided second order at both ends
    const double h0 = r[1] - r[0], h1 = r[2] - r[1];
    dv[0] = (-(2 * h0 + h1) * v[0] + (h0 + h1) * (h0 + h1) / h1 * v[1] -
             h0 * h0 / h1 * v[2]) /
            (h0 * (h0 + h1));
    const double hn = r[m - 1] - r[m - 2], hp = r[m - 2] - r[m - 3];
    dv[m - 1] = ((2 * hn + hp) * v[m - 1] -
                 (hn + hp) * (hn + hp) / hp * v[m - 2] +
                 hn * hn / hp * v[m - 3]) /
                (hn * (hn + hp));
  }
  return dv;
}

}  // namespace mq
