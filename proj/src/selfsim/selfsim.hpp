#pragma once

#include <vector>

#include "core/types.hpp"

namespace mq {

// ---- transformation tower ------------------------------------------------

// ubar = 1/(1-u) - 1; requires u in [0,1).
Field u_to_ubar(const Field& u);
// inverse: u = ubar/(ubar+1)
Field ubar_to_u(const Field& ubar);
// U = lambda^{1/(p+1)} ubar / theta; theta >= 1
Field ubar_to_U(const Field& ubar, double theta, const ModelParams& mp);
Field U_to_ubar(const Field& U, double theta, const ModelParams& mp);

// ---- blow-up profile and its closed-form derivatives -----------------------

// phi(y,s) = (p+1 + (p+1)^2/(4p) |y|^2/s)^{-1/(p+1)} + kappa n/(4s),
// kappa = (p+1)^{-1/(p+1)}.  All derivatives analytic.
struct PhiEval {
  double phi;
  double dphi_dy;   // radial derivative
  double d2phi_dy2;
  double dphi_ds;
  double lap;       // d2/dy2 + (n-1)/y d/dy, regularized n*d2 at y=0
};

double phi_profile(double y, double s, const ModelParams& mp);
PhiEval phi_eval(double y, double s, const ModelParams& mp);
double phi_kappa(const ModelParams& mp);  // (p+1)^{-1/(p+1)}

// lambda^{1/(p+1)} e^{-s/(p+1)} / theta, the decaying offset in the
// similarity-frame equation
double lambda_decay(double s, double theta, const ModelParams& mp);

// ---- similarity frame ------------------------------------------------------

// One similarity-variable snapshot.  The y-grid is the physical grid scaled
// by (T-t)^{-1/2} and extended with analytic tail nodes (W = 0, w = 0,
// q = -phi) so that weighted quadrature never leaves the grid.
struct SelfSimFrame {
  double s = 0.0;       // -ln(T-t)
  double theta_s = 1.0; // theta at this s
  double M0 = 0.0;      // cut-off scale
  std::size_t n_physical = 0;  // leading nodes that image the physical grid
  RadialGrid ygrid;
  std::vector<double> W, w, q;

  void validate(const ModelParams& mp) const;
};

// psi cut-off of the frame: chi0(M0 * y * e^{-s/2}) and derivatives.
double psi_cut(double y, double s, double M0);
double psi_cut_dy(double y, double s, double M0);
double psi_cut_dyy(double y, double s, double M0);
double psi_cut_ds(double y, double s, double M0);

SelfSimFrame to_selfsim(const Field& U, double t, double T, double M0,
                        double theta, const ModelParams& mp,
                        double tail_extent = 24.0);

// ---- terms of the equation satisfied by q ---------------------------------

// V = (p+2)(phi^{p+1} - 1/(p+1))
double potential_V(double y, double s, const ModelParams& mp);

// B = (q + phi + eps)^{p+2} - phi^{p+2} - (p+2) phi^{p+1} q,
// eps = lambda^{1/(p+1)} e^{-s/(p+1)} / theta
double term_B(double qv, double phi, double s, double theta,
              const ModelParams& mp);

// J = -2 |grad q + grad phi|^2 / (q + phi + eps) + 2 |grad phi|^2 / (phi + eps)
// gradients of q from the grid, grad phi analytic.  Nodes whose denominator
// falls below `floor` are flagged (values still computed with the floor).
struct TermJResult {
  std::vector<double> values;
  std::vector<std::size_t> flagged;
};
TermJResult term_J(const RadialGrid& ygrid, const std::vector<double>& q,
                   const std::vector<double>& gradq, double s, double theta,
                   const ModelParams& mp, double floor = 1e-8);

// R = -phi_s + lap phi - y phi_y / 2 - phi/(p+1) + phi^{p+2}
//     - 2 |grad phi|^2 / (phi + eps)
double term_R(double y, double s, double theta, const ModelParams& mp);

// N = -theta_ratio (q + phi), theta_ratio = theta'(s)/theta(s)
double term_N(double qv, double phi, double theta_ratio);

// Cut-off coupling term; identically zero outside the transition annulus
// (1/M0) e^{s/2} <= |y| <= (2/M0) e^{s/2}.
std::vector<double> term_F(const SelfSimFrame& frame, const ModelParams& mp);

// Residual of d_s q = (L+V) q + J + B + N + R + F between two consecutive
// frames of one run (forward difference in s, grid stencils in y), evaluated
// for |y| <= (1/(2 M0)) e^{s/2}.  theta_ratio is theta'(s)/theta at frame a.
struct ResidualField {
  std::vector<double> y;
  std::vector<double> value;
  double norm_inf() const;
};
ResidualField q_equation_residual(const SelfSimFrame& a, const SelfSimFrame& b,
                                  double theta_ratio, const ModelParams& mp);

}  // namespace mq
