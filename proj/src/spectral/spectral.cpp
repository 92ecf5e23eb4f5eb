#include "spectral/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "core/interp.hpp"
#include "selfsim/cutoff.hpp"

namespace mq {

double rho_weight(double y, int n) {
  return std::exp(-0.25 * y * y) /
         std::pow(4.0 * std::numbers::pi, 0.5 * n);
}

double rho_weight_vec(const std::vector<double>& y) {
  double r2 = 0.0;
  for (double v : y) r2 += v * v;
  return std::exp(-0.25 * r2) /
         std::pow(4.0 * std::numbers::pi, 0.5 * y.size());
}

namespace {

GaussHermite compute_gauss_hermite(int n) {
  GaussHermite q;
  q.x.resize(n);
  q.w.resize(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  std::vector<double> zs(m, 0.0);
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * zs[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * zs[1];
    } else {
      z = 2.0 * z - zs[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-15 * std::max(1.0, std::fabs(z)) && iter > 1)
        break;
    }
    zs[i] = z;
    q.x[n - 1 - i] = z;
    q.x[i] = -z;
    q.w[i] = q.w[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) q.x[n / 2] = 0.0;
  return q;
}

}  // namespace

const GaussHermite& gauss_hermite(int npoints) {
  static std::mutex mu;
  static std::map<int, GaussHermite> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(npoints);
  if (it == cache.end())
    it = cache.emplace(npoints, compute_gauss_hermite(npoints)).first;
  return it->second;
}

double Hermite1D::eval(int m, double y) const {
  const auto& c = coeff[m];
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * y + c[k];
  return acc;
}

double Hermite1D::eval_deriv(int m, double y) const {
  const auto& c = coeff[m];
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * y + c[k] * double(k);
  return acc;
}

std::vector<std::int64_t> twice_L_apply(const std::vector<std::int64_t>& h) {
  // 2*L h = 2 h'' - y h' + 2 h, exact in integer coefficients.
  const std::size_t d = h.size();
  std::vector<std::int64_t> out(d, 0);
  for (std::size_t k = 0; k < d; ++k) {
    out[k] += 2 * h[k];                                   // 2 h
    out[k] -= static_cast<std::int64_t>(k) * h[k];        // -y h'
    if (k + 2 < d)
      out[k] += 2 * static_cast<std::int64_t>((k + 2) * (k + 1)) * h[k + 2];
  }
  while (out.size() > 1 && out.back() == 0) out.pop_back();
  return out;
}

HermiteBasis build_basis(int n, int max_degree) {
  if (max_degree < 3)
    throw std::invalid_argument("build_basis: max_degree must be >= 3");
  if (n < 1 || n > 3)
    throw std::invalid_argument("build_basis: tensor basis supports n <= 3");
  HermiteBasis b;
  b.n = n;
  b.max_degree = max_degree;
  b.h1d.coeff.resize(max_degree + 1);
  b.h1d.coeff[0] = {1};
  if (max_degree >= 1) b.h1d.coeff[1] = {0, 1};
  for (int m = 1; m < max_degree; ++m) {
    // h_{m+1} = y h_m - 2 m h_{m-1}
    std::vector<std::int64_t> c(m + 2, 0);
    for (int k = 0; k <= m; ++k) c[k + 1] += b.h1d.coeff[m][k];
    for (int k = 0; k < static_cast<int>(b.h1d.coeff[m - 1].size()); ++k)
      c[k] -= 2 * static_cast<std::int64_t>(m) * b.h1d.coeff[m - 1][k];
    b.h1d.coeff[m + 1] = std::move(c);
  }
  std::array<int, 3> beta{0, 0, 0};
  const int b1 = max_degree;
  for (int i = 0; i <= b1; ++i)
    for (int j = 0; j <= (n > 1 ? b1 - i : 0); ++j)
      for (int k = 0; k <= (n > 2 ? b1 - i - j : 0); ++k) {
        beta = {i, j, k};
        b.multi_indices.push_back(beta);
      }
  return b;
}

double HermiteBasis::eval(const std::array<int, 3>& beta, const double* y) const {
  double v = h1d.eval(beta[0], y[0]);
  if (n > 1) v *= h1d.eval(beta[1], y[1]);
  if (n > 2) v *= h1d.eval(beta[2], y[2]);
  return v;
}

double HermiteBasis::norm2(const std::array<int, 3>& beta) const {
  // <h_m, h_m>_rho = 2^m m! per axis
  double v = 1.0;
  for (int i = 0; i < n; ++i) {
    double f = 1.0;
    for (int k = 2; k <= beta[i]; ++k) f *= k;
    v *= std::pow(2.0, beta[i]) * f;
  }
  return v;
}

namespace {

// sum over tensor Gauss-Hermite nodes of f(2x) g(2x) with normalized weight
double quad_rho(const PointFn& f, const PointFn& g, int n, int npoints) {
  const auto& gh = gauss_hermite(npoints);
  const double norm = std::pow(std::numbers::pi, -0.5 * n);
  double acc = 0.0;
  double y[3] = {0, 0, 0};
  if (n == 1) {
    for (int i = 0; i < npoints; ++i) {
      y[0] = 2.0 * gh.x[i];
      acc += gh.w[i] * f(y) * g(y);
    }
  } else if (n == 2) {
    for (int i = 0; i < npoints; ++i)
      for (int j = 0; j < npoints; ++j) {
        y[0] = 2.0 * gh.x[i];
        y[1] = 2.0 * gh.x[j];
        acc += gh.w[i] * gh.w[j] * f(y) * g(y);
      }
  } else {
    for (int i = 0; i < npoints; ++i)
      for (int j = 0; j < npoints; ++j)
        for (int k = 0; k < npoints; ++k) {
          y[0] = 2.0 * gh.x[i];
          y[1] = 2.0 * gh.x[j];
          y[2] = 2.0 * gh.x[k];
          acc += gh.w[i] * gh.w[j] * gh.w[k] * f(y) * g(y);
        }
  }
  return acc * norm;
}

double radius(const double* y, int n) {
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += y[i] * y[i];
  return std::sqrt(r2);
}

}  // namespace

double inner_rho(const PointFn& f, const PointFn& g, int n, int npoints) {
  return quad_rho(f, g, n, npoints);
}

double inner_rho(const Field& f, const HermiteBasis& basis,
                 const std::array<int, 3>& beta, int npoints) {
  const int n = basis.n;
  PointFn ff = [&](const double* y) { return eval_radial(f, radius(y, n)); };
  PointFn gg = [&](const double* y) { return basis.eval(beta, y); };
  return quad_rho(ff, gg, n, npoints);
}

double SpectralComponents::q1_max() const {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(q1[i]));
  return m;
}

double SpectralComponents::q2_max() const {
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m = std::max(m, std::fabs(q2[i][j]));
  return m;
}

double reconstruct_low(const SpectralComponents& c, double y) {
  double tr = 0.0;
  for (int i = 0; i < c.n; ++i) tr += c.q2[i][i];
  return c.q0 + c.q1[0] * y + c.q2[0][0] * y * y - 2.0 * tr;
}

SpectralComponents decompose_fn(const PointFn& r, double s, double K0,
                                const HermiteBasis& basis,
                                const RadialGrid& out_grid, int npoints) {
  if (!(s > 0.0)) throw std::invalid_argument("decompose: s must be > 0");
  if (!(K0 > 0.0)) throw std::invalid_argument("decompose: K0 must be > 0");
  const int n = basis.n;
  const double cut = K0 * std::sqrt(s);

  SpectralComponents c;
  c.n = n;
  c.s = s;
  c.K0 = K0;

  PointFn rb = [&, cut](const double* y) {
    return chi0(radius(y, n) / cut) * r(y);
  };
  // coefficients of the degree <= 2 block, normalized by the squared norm so
  // that the reconstruction identity holds
  for (const auto& beta : basis.multi_indices) {
    const int deg = beta[0] + beta[1] + beta[2];
    if (deg > 2) continue;
    PointFn hb = [&](const double* y) { return basis.eval(beta, y); };
    const double coef = quad_rho(rb, hb, n, npoints) / basis.norm2(beta);
    if (deg == 0) {
      c.q0 = coef;
    } else if (deg == 1) {
      for (int i = 0; i < n; ++i)
        if (beta[i] == 1) c.q1[i] = coef;
    } else {
      int which = -1, other = -1;
      for (int i = 0; i < n; ++i) {
        if (beta[i] == 2) which = i;
        if (beta[i] == 1) (which == -1 && other == -1 ? which : other) = i;
      }
      if (other == -1) {
        c.q2[which][which] = coef;  // coefficient of (y_i^2 - 2)
      } else {
        c.q2[which][other] = c.q2[other][which] = 0.5 * coef;  // of y_i y_j
      }
    }
  }

  const GridPtr gp = share(out_grid);
  c.q_minus = Field(gp);
  c.q_perp = Field(gp);
  c.q_e = Field(gp);
  c.r_input = Field(gp);
  double tr = 0.0;
  for (int i = 0; i < n; ++i) tr += c.q2[i][i];
  for (std::size_t j = 0; j < out_grid.nodes.size(); ++j) {
    const double y = out_grid.nodes[j];
    double pt[3] = {y, 0.0, 0.0};
    const double rv = r(pt);
    const double chi = chi0(y / cut);
    const double rbv = chi * rv;
    const double low1 = c.q0 + c.q1[0] * y;
    const double low2 = low1 + c.q2[0][0] * y * y - 2.0 * tr;
    c.r_input[j] = rv;
    c.q_minus[j] = rbv - low2;
    c.q_perp[j] = rbv - low1;
    c.q_e[j] = (1.0 - chi) * rv;
  }
  return c;
}

SpectralComponents decompose(const Field& r, double s, double K0,
                             const HermiteBasis& basis, int npoints) {
  r.validate();
  const double ymax = r.grid->rmax();
  const auto& gh = gauss_hermite(npoints);
  double missing = 0.0;
  for (int i = 0; i < npoints; ++i)
    if (std::fabs(2.0 * gh.x[i]) > ymax) missing += gh.w[i];
  missing /= std::sqrt(std::numbers::pi);
  if (missing > 1e-14) {
    double vmax = 0.0, edge = 0.0;
    for (double v : r.values) vmax = std::max(vmax, std::fabs(v));
    for (std::size_t j = r.size() >= 3 ? r.size() - 3 : 0; j < r.size(); ++j)
      edge = std::max(edge, std::fabs(r.values[j]));
    if (edge > 1e-13 * std::max(vmax, 1e-300))
      throw std::invalid_argument(
          "decompose: grid extent does not cover the quadrature support and "
          "the field has not decayed at the boundary");
  }
  const int n = basis.n;
  PointFn fr = [&](const double* y) {
    const double rad = radius(y, n);
    return rad > ymax ? 0.0 : eval_radial(r, rad);
  };
  return decompose_fn(fr, s, K0, basis, *r.grid, npoints);
}

ComponentNorms component_norms(const SpectralComponents& c,
                               const HermiteBasis& basis, int npoints) {
  ComponentNorms nn;
  nn.a_q0 = std::fabs(c.q0);
  nn.a_q1 = c.q1_max();
  nn.a_q2 = c.q2_max();
  const auto& y = c.q_minus.grid->nodes;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double w3 = 1.0 + y[j] * y[j] * y[j];
    nn.a_qminus = std::max(nn.a_qminus, std::fabs(c.q_minus[j]) / w3);
    nn.a_qe = std::max(nn.a_qe, std::fabs(c.q_e[j]));
  }
  // gradient of the input along the radius, projected off degrees 0 and 1
  const auto grad = grid_gradient(*c.r_input.grid, c.r_input.values);
  const double cut = c.K0 * std::sqrt(c.s);
  const int n = c.n;
  // odd radial extension: (grad r)_1(y) = g(|y|) * y_1/|y|
  PointFn g1 = [&](const double* yv) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += yv[i] * yv[i];
    const double rad = std::sqrt(r2);
    if (rad == 0.0) return 0.0;
    const double gval = cubic_interp(y, grad, std::min(rad, y.back()));
    return chi0(rad / cut) * gval * (yv[0] / rad);
  };
  double p0, p1[3] = {0, 0, 0};
  {
    PointFn one = [](const double*) { return 1.0; };
    p0 = quad_rho(g1, one, n, npoints);
    for (int i = 0; i < n; ++i) {
      PointFn yi = [i](const double* yv) { return yv[i]; };
      p1[i] = quad_rho(g1, yi, n, npoints) / 2.0;
    }
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double w3 = 1.0 + y[j] * y[j] * y[j];
    const double chi = chi0(y[j] / cut);
    const double perp = chi * grad[j] - p0 - p1[0] * y[j];
    nn.a_gradperp = std::max(nn.a_gradperp, std::fabs(perp) / w3);
  }
  return nn;
}

}  // namespace mq
