#include "selfsim/selfsim.hpp"

#include <cmath>

#include "core/interp.hpp"
#include "selfsim/cutoff.hpp"

namespace mq {

namespace {

// power that tolerates a negative base for integral exponents
double rpow(double x, double a) {
  if (x >= 0.0) return std::pow(x, a);
  const double ar = std::round(a);
  if (std::fabs(a - ar) < 1e-12) {
    const double v = std::pow(-x, a);
    return (static_cast<long long>(ar) % 2 == 0) ? v : -v;
  }
  throw std::domain_error("negative base with non-integral exponent");
}

}  // namespace

Field u_to_ubar(const Field& u) {
  u.validate();
  Field ub(u.grid, u.time);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!(u[j] >= 0.0 && u[j] < 1.0))
      throw std::invalid_argument("u_to_ubar: u must lie in [0,1)");
    ub[j] = u[j] / (1.0 - u[j]);
  }
  return ub;
}

Field ubar_to_u(const Field& ubar) {
  ubar.validate();
  Field u(ubar.grid, ubar.time);
  for (std::size_t j = 0; j < ubar.size(); ++j) u[j] = ubar[j] / (ubar[j] + 1.0);
  return u;
}

Field ubar_to_U(const Field& ubar, double theta, const ModelParams& mp) {
  if (!(theta >= 1.0)) throw std::invalid_argument("ubar_to_U: theta must be >= 1");
  Field U(ubar.grid, ubar.time);
  const double c = std::pow(mp.lambda, 1.0 / (mp.p_exp + 1.0)) / theta;
  for (std::size_t j = 0; j < ubar.size(); ++j) U[j] = c * ubar[j];
  return U;
}

Field U_to_ubar(const Field& U, double theta, const ModelParams& mp) {
  if (!(theta >= 1.0)) throw std::invalid_argument("U_to_ubar: theta must be >= 1");
  Field ub(U.grid, U.time);
  const double c = theta / std::pow(mp.lambda, 1.0 / (mp.p_exp + 1.0));
  for (std::size_t j = 0; j < U.size(); ++j) ub[j] = c * U[j];
  return ub;
}

double phi_kappa(const ModelParams& mp) {
  const double P = mp.p_exp + 1.0;
  return std::pow(P, -1.0 / P);
}

PhiEval phi_eval(double y, double s, const ModelParams& mp) {
  if (!(s > 0.0)) throw std::invalid_argument("phi: s must be > 0");
  const double P = mp.p_exp + 1.0;
  const double b = P * P / (4.0 * mp.p_exp);
  const double n = mp.dim;
  const double D = P + b * y * y / s;
  const double G = std::pow(D, -1.0 / P);
  const double Dm = std::pow(D, -(P + 1.0) / P);
  const double Dm2 = std::pow(D, -(2.0 * P + 1.0) / P);
  PhiEval e;
  e.phi = G + phi_kappa(mp) * n / (4.0 * s);
  e.dphi_dy = -(2.0 * b * y / (P * s)) * Dm;
  e.d2phi_dy2 = -(2.0 * b / (P * s)) * Dm +
                (4.0 * b * b * y * y * (P + 1.0) / (P * P * s * s)) * Dm2;
  e.dphi_ds = (b * y * y / (P * s * s)) * Dm - phi_kappa(mp) * n / (4.0 * s * s);
  if (y > 0.0) {
    e.lap = e.d2phi_dy2 + (n - 1.0) / y * e.dphi_dy;
  } else {
    e.lap = n * e.d2phi_dy2;
  }
  return e;
}

double phi_profile(double y, double s, const ModelParams& mp) {
  return phi_eval(y, s, mp).phi;
}

double lambda_decay(double s, double theta, const ModelParams& mp) {
  const double P = mp.p_exp + 1.0;
  return std::pow(mp.lambda, 1.0 / P) * std::exp(-s / P) / theta;
}

double psi_cut(double y, double s, double M0) {
  return chi0(M0 * y * std::exp(-0.5 * s));
}

double psi_cut_dy(double y, double s, double M0) {
  const double c = M0 * std::exp(-0.5 * s);
  return chi0_prime(c * y) * c;
}

double psi_cut_dyy(double y, double s, double M0) {
  const double c = M0 * std::exp(-0.5 * s);
  return chi0_second(c * y) * c * c;
}

double psi_cut_ds(double y, double s, double M0) {
  const double a = M0 * y * std::exp(-0.5 * s);
  return -0.5 * a * chi0_prime(a);
}

void SelfSimFrame::validate(const ModelParams& mp) const {
  if (!(s > 0.0)) throw std::invalid_argument("frame: s must be > 0");
  const double support = 2.0 / M0 * std::exp(0.5 * s);
  for (std::size_t j = 0; j < ygrid.nodes.size(); ++j) {
    if (ygrid.nodes[j] >= support && w[j] != 0.0)
      throw std::invalid_argument("frame: w must vanish beyond the cut-off");
    const double expect = w[j] - phi_profile(ygrid.nodes[j], s, mp);
    if (std::fabs(q[j] - expect) > 1e-12 * std::max(1.0, std::fabs(expect)))
      throw std::invalid_argument("frame: q != w - phi");
  }
}

SelfSimFrame to_selfsim(const Field& U, double t, double T, double M0,
                        double theta, const ModelParams& mp,
                        double tail_extent) {
  if (!(t < T)) throw std::invalid_argument("to_selfsim: need t < T");
  U.validate();
  SelfSimFrame f;
  f.s = -std::log(T - t);
  f.theta_s = theta;
  f.M0 = M0;
  const double sc = 1.0 / std::sqrt(T - t);

  const auto& r = U.grid->nodes;
  f.n_physical = r.size();
  f.ygrid.nodes.reserve(r.size() + 128);
  for (double rj : r) f.ygrid.nodes.push_back(rj * sc);
  const double ymax_phys = f.ygrid.nodes.back();
  for (double y = ymax_phys + 0.2; y < tail_extent; y += 0.2)
    f.ygrid.nodes.push_back(y);

  const std::size_t m = f.ygrid.nodes.size();
  f.W.assign(m, 0.0);
  f.w.assign(m, 0.0);
  f.q.assign(m, 0.0);
  const double wscale = std::pow(T - t, 1.0 / (mp.p_exp + 1.0));
  for (std::size_t j = 0; j < m; ++j) {
    const double y = f.ygrid.nodes[j];
    if (j < f.n_physical) {
      f.W[j] = wscale * U[j];
      f.w[j] = f.W[j] * psi_cut(y, f.s, M0);
    }
    f.q[j] = f.w[j] - phi_profile(y, f.s, mp);
  }
  return f;
}

double potential_V(double y, double s, const ModelParams& mp) {
  const double P = mp.p_exp + 1.0;
  const double phi = phi_profile(y, s, mp);
  return (mp.p_exp + 2.0) * (std::pow(phi, P) - 1.0 / P);
}

double term_B(double qv, double phi, double s, double theta,
              const ModelParams& mp) {
  if (!(theta >= 1.0)) throw std::invalid_argument("term_B: theta must be >= 1");
  const double P = mp.p_exp + 1.0;
  const double eps = lambda_decay(s, theta, mp);
  return rpow(qv + phi + eps, P + 1.0) - rpow(phi, P + 1.0) -
         (P + 1.0) * rpow(phi, P) * qv;
}

TermJResult term_J(const RadialGrid& ygrid, const std::vector<double>& q,
                   const std::vector<double>& gradq, double s, double theta,
                   const ModelParams& mp, double floor) {
  if (q.size() != ygrid.nodes.size() || gradq.size() != q.size())
    throw std::invalid_argument("term_J: size mismatch");
  TermJResult out;
  out.values.resize(q.size());
  const double eps = lambda_decay(s, theta, mp);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double y = ygrid.nodes[j];
    const PhiEval pe = phi_eval(y, s, mp);
    double den1 = q[j] + pe.phi + eps;
    double den2 = pe.phi + eps;
    if (den1 < floor || den2 < floor) {
      out.flagged.push_back(j);
      den1 = std::max(den1, floor);
      den2 = std::max(den2, floor);
    }
    const double g = gradq[j] + pe.dphi_dy;
    out.values[j] = -2.0 * g * g / den1 + 2.0 * pe.dphi_dy * pe.dphi_dy / den2;
  }
  return out;
}

double term_R(double y, double s, double theta, const ModelParams& mp) {
  const double P = mp.p_exp + 1.0;
  const double eps = lambda_decay(s, theta, mp);
  const PhiEval pe = phi_eval(y, s, mp);
  return -pe.dphi_ds + pe.lap - 0.5 * y * pe.dphi_dy - pe.phi / P +
         std::pow(pe.phi, P + 1.0) -
         2.0 * pe.dphi_dy * pe.dphi_dy / (pe.phi + eps);
}

double term_N(double qv, double phi, double theta_ratio) {
  return -theta_ratio * (qv + phi);
}

std::vector<double> term_F(const SelfSimFrame& frame, const ModelParams& mp) {
  const auto& y = frame.ygrid.nodes;
  const double s = frame.s;
  const double lo = std::exp(0.5 * s) / frame.M0;
  const double hi = 2.0 * lo;
  const double eps = lambda_decay(s, frame.theta_s, mp);
  const double P = mp.p_exp + 1.0;
  const double n = mp.dim;
  const auto gradW = grid_gradient(frame.ygrid, frame.W);
  std::vector<double> F(y.size(), 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] <= lo || y[j] >= hi) continue;  // cut-off terms cancel there
    const double psi = psi_cut(y[j], s, frame.M0);
    const double psi_y = psi_cut_dy(y[j], s, frame.M0);
    const double psi_yy = psi_cut_dyy(y[j], s, frame.M0);
    const double psi_s = psi_cut_ds(y[j], s, frame.M0);
    const double lap_psi = psi_yy + (n - 1.0) / y[j] * psi_y;
    const double W = frame.W[j];
    const double wv = frame.w[j];
    const double Wy = gradW[j];
    const double wy = psi * Wy + W * psi_y;
    F[j] = W * (psi_s - lap_psi + 0.5 * y[j] * psi_y) - 2.0 * psi_y * Wy +
           2.0 * wy * wy / (wv + eps) - 2.0 * psi * Wy * Wy / (W + eps) +
           psi * rpow(W + eps, P + 1.0) - rpow(wv + eps, P + 1.0);
  }
  return F;
}

double ResidualField::norm_inf() const {
  double m = 0.0;
  for (double v : value) m = std::max(m, std::fabs(v));
  return m;
}

ResidualField q_equation_residual(const SelfSimFrame& a, const SelfSimFrame& b,
                                  double theta_ratio, const ModelParams& mp) {
  const double ds = b.s - a.s;
  if (!(ds > 0.0 && ds <= 0.100001))
    throw std::invalid_argument("q_equation_residual: need 0 < ds <= 0.1");
  if (a.n_physical != b.n_physical)
    throw std::invalid_argument("q_equation_residual: mismatched grids");
  // both frames must image the same physical grid
  const double ra = a.ygrid.nodes[a.n_physical - 1] * std::exp(-0.5 * a.s);
  const double rb = b.ygrid.nodes[b.n_physical - 1] * std::exp(-0.5 * b.s);
  if (std::fabs(ra - rb) > 1e-10 * std::max(1.0, ra))
    throw std::invalid_argument("q_equation_residual: mismatched grids");

  const double region = std::exp(0.5 * a.s) / (2.0 * a.M0);
  const auto& y = a.ygrid.nodes;
  const auto F = term_F(a, mp);
  ResidualField out;
  for (std::size_t j = 1; j + 1 < a.n_physical; ++j) {
    if (y[j] > region) break;
    const double hm = y[j] - y[j - 1], hp = y[j + 1] - y[j];
    const double qy = (hm * hm * a.q[j + 1] + (hp * hp - hm * hm) * a.q[j] -
                       hp * hp * a.q[j - 1]) /
                      (hm * hp * (hm + hp));
    const double qyy = 2.0 * ((a.q[j + 1] - a.q[j]) / hp -
                              (a.q[j] - a.q[j - 1]) / hm) /
                       (hm + hp);
    const double lap_q = qyy + (mp.dim - 1.0) / y[j] * qy;
    const double Lq = lap_q - 0.5 * y[j] * qy + a.q[j];
    const PhiEval pe = phi_eval(y[j], a.s, mp);
    const double V = potential_V(y[j], a.s, mp);
    const double eps = lambda_decay(a.s, a.theta_s, mp);
    const double g = qy + pe.dphi_dy;
    const double J = -2.0 * g * g / (a.q[j] + pe.phi + eps) +
                     2.0 * pe.dphi_dy * pe.dphi_dy / (pe.phi + eps);
    const double B = term_B(a.q[j], pe.phi, a.s, a.theta_s, mp);
    const double N = term_N(a.q[j], pe.phi, theta_ratio);
    const double R = term_R(y[j], a.s, a.theta_s, mp);
    const double qb = cubic_interp(b.ygrid.nodes, b.q, y[j]);
    const double dq_ds = (qb - a.q[j]) / ds;
    out.y.push_back(y[j]);
    out.value.push_back(dq_ds - (Lq + V * a.q[j] + J + B + N + R + F[j]));
  }
  if (out.y.empty())
    throw std::invalid_argument("q_equation_residual: empty evaluation region");
  return out;
}

}  // namespace mq
