#include "nonlocal/theta.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "core/interp.hpp"
#include "io/format.hpp"

namespace mq {

double integrate_radial(const Field& f, const ModelParams& mp) {
  f.validate();
  const auto& r = f.grid->nodes;
  const double n = mp.dim;
  double acc = 0.0;
  for (std::size_t j = 1; j < r.size(); ++j) {
    const double g0 = f[j - 1] * std::pow(r[j - 1], n - 1.0);
    const double g1 = f[j] * std::pow(r[j], n - 1.0);
    acc += 0.5 * (g0 + g1) * (r[j] - r[j - 1]);
  }
  return sphere_measure(mp.dim) * acc;
}

double theta_cubic_residual(double theta, double A, double B) {
  const double rhs = A + B * theta;
  return theta * theta * theta - rhs * rhs;
}

double solve_theta_cubic_bracketed(double A, double B) {
  if (!(A >= 1.0)) throw std::invalid_argument("solve_theta_cubic: A must be >= 1");
  if (!(B >= 0.0)) throw std::invalid_argument("solve_theta_cubic: B must be >= 0");
  double lo = std::pow(A, 2.0 / 3.0);
  double hi = lo + B * B + 2.0 * B + 1.0;
  // the residual is <= 0 at lo and grows cubically; widen if the stated
  // upper end has not crossed yet
  int widen = 0;
  while (theta_cubic_residual(hi, A, B) < 0.0) {
    hi *= 2.0;
    if (++widen > 200)
      throw std::runtime_error("solve_theta_cubic: bracket failure");
  }
  // safeguarded Newton inside [lo, hi]
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = theta_cubic_residual(x, A, B);
    if (g > 0.0)
      hi = x;
    else
      lo = x;
    const double dg = 3.0 * x * x - 2.0 * B * (A + B * x);
    double step = dg != 0.0 ? x - g / dg : 0.5 * (lo + hi);
    if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
    if (std::fabs(step - x) <= 1e-16 * std::max(1.0, x)) {
      x = step;
      break;
    }
    x = step;
  }
  return x;
}

double solve_theta_cubic(double A, double B) {
  if (!(A >= 1.0)) throw std::invalid_argument("solve_theta_cubic: A must be >= 1");
  if (!(B >= 0.0)) throw std::invalid_argument("solve_theta_cubic: B must be >= 0");
  // depressed-cubic closed form for theta^3 - B^2 theta^2 - 2AB theta - A^2,
  // shift theta = x + B^2/3; the discriminant A^4/4 + A^3 B^3 / 27 is
  // positive, so the real Cardano branch applies
  const double B3 = B * B * B;
  const double N = 27.0 * A * A + 2.0 * B3 * B3 + 18.0 * A * B3 +
                   3.0 * std::sqrt(3.0) *
                       std::sqrt(27.0 * A * A * A * A + 4.0 * A * A * A * B3);
  const double cbrtN = std::cbrt(N);
  const double cbrt2 = std::cbrt(2.0);
  double theta = cbrtN / (3.0 * cbrt2) + B * B / 3.0 +
                 cbrt2 * (6.0 * A * B + B * B * B * B) / (3.0 * cbrtN);
  // one Newton polish of the radical value
  for (int it = 0; it < 2; ++it) {
    const double g = theta_cubic_residual(theta, A, B);
    const double dg = 3.0 * theta * theta - 2.0 * B * (A + B * theta);
    if (dg != 0.0) theta -= g / dg;
  }
  const double iter = solve_theta_cubic_bracketed(A, B);
  if (std::fabs(theta - iter) > 1e-10 * iter)
    throw std::runtime_error("solve_theta_cubic: closed form disagrees with bracketed root");
  const double res = std::fabs(theta_cubic_residual(theta, A, B));
  if (res > 1e-12 * std::max(1.0, theta * theta * theta))
    throw std::runtime_error("solve_theta_cubic: residual too large");
  return theta;
}

double theta_of_mu(double mu, const ModelParams& mp) {
  if (!(mu >= 0.0)) throw std::invalid_argument("theta_of_mu: mu must be >= 0");
  const double A = 1.0 + mp.gamma * ball_volume(mp);
  const double B = mp.gamma * mu / std::pow(mp.lambda, 1.0 / (mp.p_exp + 1.0));
  return solve_theta_cubic(A, B);
}

double alpha_of_u(const Field& u, const ModelParams& mp) {
  u.validate();
  Field inv(u.grid, u.time);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!(u[j] < 1.0))
      throw std::invalid_argument("alpha_of_u: u has reached 1 (quench)");
    inv[j] = 1.0 / (1.0 - u[j]);
  }
  const double I = integrate_radial(inv, mp);
  return mp.lambda * std::pow(1.0 + mp.gamma * I, -mp.q_exp);
}

void ThetaTrace::push(double t, double mu, double theta) {
  if (!samples.empty() && !(t > samples.back().t))
    throw std::invalid_argument("theta trace: times must increase");
  ThetaSample s;
  s.t = t;
  s.mu = mu;
  s.theta = theta;
  samples.push_back(s);
}

void ThetaTrace::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && !(samples[i].t > samples[i - 1].t))
      throw std::invalid_argument("theta trace: times must increase");
    if (!(samples[i].theta >= 1.0))
      throw std::invalid_argument("theta trace: theta below 1");
    if (!(samples[i].mu >= 0.0))
      throw std::invalid_argument("theta trace: negative mu");
  }
}

ThetaTrace finite_diff_theta_prime(const ThetaTrace& trace) {
  const auto& ss = trace.samples;
  if (ss.size() < 2)
    throw std::invalid_argument("finite_diff_theta_prime: need >= 2 samples");
  ThetaTrace out = trace;
  auto& os = out.samples;
  const std::size_t m = ss.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      os[i].theta_prime = (ss[1].theta - ss[0].theta) / (ss[1].t - ss[0].t);
    } else if (i + 1 == m) {
      os[i].theta_prime =
          (ss[m - 1].theta - ss[m - 2].theta) / (ss[m - 1].t - ss[m - 2].t);
    } else {
      // three-point formula, exact on quadratics for nonuniform spacing
      const double hm = ss[i].t - ss[i - 1].t, hp = ss[i + 1].t - ss[i].t;
      os[i].theta_prime = (hm * hm * ss[i + 1].theta +
                           (hp * hp - hm * hm) * ss[i].theta -
                           hp * hp * ss[i - 1].theta) /
                          (hm * hp * (hm + hp));
    }
  }
  return out;
}

double ThetaTrace::theta_ratio_s(double t, double T) const {
  if (samples.size() < 2)
    throw std::invalid_argument("theta_ratio_s: need >= 2 samples");
  // nearest neighbours of t
  std::size_t i = 1;
  while (i + 1 < samples.size() && samples[i].t < t) ++i;
  const auto& a = samples[i - 1];
  const auto& b = samples[i];
  const double dtheta_dt = (b.theta - a.theta) / (b.t - a.t);
  const double theta = linear_interp(a.t, a.theta, b.t, b.theta, t);
  // d theta/ds = theta'(t) (T - t)
  return dtheta_dt * (T - t) / theta;
}

std::string ThetaTrace::to_csv() const {
  std::ostringstream os;
  os << "t,mu,theta,theta_prime\n";
  for (const auto& s : samples)
    os << fmt17(s.t) << ',' << fmt17(s.mu) << ',' << fmt17(s.theta) << ','
       << fmt17(s.theta_prime) << '\n';
  return os.str();
}

}  // namespace mq
