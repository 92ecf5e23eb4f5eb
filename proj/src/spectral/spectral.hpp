#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "core/types.hpp"

namespace mq {

// Gaussian weight rho(y) = exp(-|y|^2/4) / (4 pi)^{n/2}; integrates to 1.
double rho_weight(double y, int n);
double rho_weight_vec(const std::vector<double>& y);

// Nodes/weights for int f(x) exp(-x^2) dx = sum w_i f(x_i).
struct GaussHermite {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussHermite& gauss_hermite(int npoints = 64);

// One-dimensional rescaled Hermite polynomials h_m, integer coefficients,
// h_0 = 1, h_1 = y, h_{m+1} = y h_m - 2 m h_{m-1}.  They satisfy
// L h_m = (1 - m/2) h_m with L = d^2/dy^2 - (y/2) d/dy + Id, and
// <h_m, h_m>_rho = 2^m m!.
struct Hermite1D {
  std::vector<std::vector<std::int64_t>> coeff;  // coeff[m][k] of y^k

  double eval(int m, double y) const;
  double eval_deriv(int m, double y) const;
};

// Tensor basis h_beta(y) = prod_i h_{beta_i}(y_i) for multi-indices
// |beta| <= max_degree, dim n (n <= 3 for the tensor part).
struct HermiteBasis {
  int n = 1;
  int max_degree = 3;
  Hermite1D h1d;
  std::vector<std::array<int, 3>> multi_indices;  // |beta| <= max_degree

  double eval(const std::array<int, 3>& beta, const double* y) const;
  double norm2(const std::array<int, 3>& beta) const;  // <h_b, h_b>_rho
};

HermiteBasis build_basis(int n, int max_degree);

// Coefficients of 2*(L h) for integer polynomial h; exact integer algebra.
std::vector<std::int64_t> twice_L_apply(const std::vector<std::int64_t>& h);

// Any pointwise evaluator over R^n (y has basis.n meaningful components).
using PointFn = std::function<double(const double*)>;

// Weighted inner product <f, g>_rho by Gauss-Hermite quadrature (substitution
// y = 2x per axis; 64 nodes integrate polynomial degree 127 exactly).
double inner_rho(const PointFn& f, const PointFn& g, int n, int npoints = 64);
// Field (radial, even in each |y|) against a basis element.
double inner_rho(const Field& f, const HermiteBasis& basis,
                 const std::array<int, 3>& beta, int npoints = 64);

// Decomposition of a function in L^2_rho against the cut-off chi(y,s):
// chi*r = q0 + q1.y + y^T q2 y - 2 tr(q2) + q_minus, r = chi*r + q_e.
struct SpectralComponents {
  int n = 1;
  double s = 0.0;
  double K0 = 0.0;
  double q0 = 0.0;
  std::array<double, 3> q1{0, 0, 0};
  std::array<std::array<double, 3>, 3> q2{};  // symmetric order-n block
  Field q_minus;  // chi*r minus its degree <= 2 part, on the output grid
  Field q_perp;   // chi*r minus its degree <= 1 part
  Field q_e;      // (1 - chi)*r
  Field r_input;  // copy of the decomposed function on the output grid

  double q1_max() const;
  double q2_max() const;
};

// r as a pointwise function of the signed coordinates (n <= 3).
SpectralComponents decompose_fn(const PointFn& r, double s, double K0,
                                const HermiteBasis& basis,
                                const RadialGrid& out_grid, int npoints = 64);

// Radial grid function; even extension about the origin.  Errors when the
// quadrature needs values beyond the grid while the field has not decayed
// there (total missing rho-weight > 1e-14 and a non-negligible edge value).
SpectralComponents decompose(const Field& r, double s, double K0,
                             const HermiteBasis& basis, int npoints = 64);

// The six scalars bounded by the shrinking-set definition in the singular
// region: |q0|, max|q1|, max|q2|, sup |q_-|/(1+|y|^3), sup|q_e|,
// sup |(grad q)_perp|/(1+|y|^3).
struct ComponentNorms {
  double a_q0 = 0.0;
  double a_q1 = 0.0;
  double a_q2 = 0.0;
  double a_qminus = 0.0;
  double a_qe = 0.0;
  double a_gradperp = 0.0;
};

ComponentNorms component_norms(const SpectralComponents& c,
                               const HermiteBasis& basis, int npoints = 64);

// Degree <= 2 part evaluated at radius y (radial slice along the first axis).
double reconstruct_low(const SpectralComponents& c, double y);

}  // namespace mq
