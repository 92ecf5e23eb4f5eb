#include <cmath>
#include <numbers>
#include <random>

#include "core/types.hpp"
#include "doctest.h"
#include "nonlocal/theta.hpp"

using namespace mq;

namespace {

Field const_field(const GridPtr& g, double v) {
  Field f(g);
  for (auto& x : f.values) x = v;
  return f;
}

// independent bisection oracle on theta^3 - (A + B theta)^2
double bisect_root(double A, double B) {
  double lo = std::pow(A, 2.0 / 3.0), hi = lo + (B + 1.0) * (B + 1.0);
  while (theta_cubic_residual(hi, A, B) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (theta_cubic_residual(mid, A, B) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("integrate_radial basics") {
  ModelParams mp;
  mp.dim = 1;
  mp.radius = 1.0;
  auto g = share(make_graded_grid(64, 1.0, 1.0));
  CHECK(integrate_radial(const_field(g, 0.0), mp) == 0.0);
  CHECK(integrate_radial(const_field(g, 1.0), mp) ==
        doctest::Approx(2.0).epsilon(1e-13));  // equals the interval length
}

TEST_CASE("integrate_radial r^2 on the 3-ball") {
  // closed form: 4 pi int_0^1 r^4 dr = 4 pi / 5
  ModelParams mp;
  mp.dim = 3;
  mp.radius = 1.0;
  auto g = share(make_graded_grid(2000, 1.0, 1.0));
  Field f(g);
  for (std::size_t j = 0; j < f.size(); ++j)
    f[j] = g->nodes[j] * g->nodes[j];
  CHECK(integrate_radial(f, mp) ==
        doctest::Approx(4.0 * std::numbers::pi / 5.0).epsilon(1e-6));
}

TEST_CASE("cubic root trivial values") {
  CHECK(solve_theta_cubic(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(solve_theta_cubic(8.0, 0.0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("cubic root A=1 B=1 sits in (2, 2.2)") {
  // g(2) = 8 - 9 < 0 < g(2.2) = 10.648 - 10.24
  CHECK(theta_cubic_residual(2.0, 1.0, 1.0) < 0.0);
  CHECK(theta_cubic_residual(2.2, 1.0, 1.0) > 0.0);
  const double th = solve_theta_cubic(1.0, 1.0);
  CHECK(th > 2.0);
  CHECK(th < 2.2);
  CHECK(th == doctest::Approx(bisect_root(1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("closed form vs bracketed root on the 50x50 grid") {
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const double A = 1.0 + 9.0 * i / 49.0;
      const double B = 10.0 * j / 49.0;
      const double closed = solve_theta_cubic(A, B);  // cross-asserts inside
      const double iter = solve_theta_cubic_bracketed(A, B);
      REQUIRE(std::fabs(closed - iter) <= 1e-10 * closed);
      REQUIRE(std::fabs(theta_cubic_residual(closed, A, B)) <=
              1e-12 * std::max(1.0, closed * closed * closed));
    }
}

TEST_CASE("cubic root is monotone in A and B") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> Ad(1.0, 10.0), Bd(0.0, 10.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double A = Ad(rng), B = Bd(rng);
    const double base = solve_theta_cubic(A, B);
    CHECK(solve_theta_cubic(A + 0.3, B) > base);
    CHECK(solve_theta_cubic(A, B + 0.3) > base);
  }
}

TEST_CASE("theta_of_mu branches") {
  ModelParams mp;
  mp.lambda = 1.0;
  mp.gamma = 0.0;
  mp.dim = 1;
  mp.radius = 0.5;
  CHECK(theta_of_mu(3.7, mp) == doctest::Approx(1.0).epsilon(1e-14));
  mp.gamma = 2.0;  // mu = 0: (1 + gamma |Omega|)^{2/3}
  CHECK(theta_of_mu(0.0, mp) ==
        doctest::Approx(std::pow(1.0 + 2.0 * 1.0, 2.0 / 3.0)).epsilon(1e-13));
  mp.gamma = 1.0;  // |Omega| = 1 -> A = 2, B = 1
  CHECK(theta_of_mu(1.0, mp) ==
        doctest::Approx(bisect_root(2.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("theta >= 1 always") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 20.0);
  ModelParams mp;
  mp.dim = 1;
  for (int rep = 0; rep < 100; ++rep) {
    mp.gamma = d(rng) * 0.1;
    mp.lambda = 0.1 + d(rng);
    CHECK(theta_of_mu(d(rng), mp) >= 1.0);
  }
}

TEST_CASE("alpha_of_u") {
  ModelParams mp;
  mp.lambda = 3.0;
  mp.gamma = 0.0;
  mp.dim = 1;
  mp.radius = 0.5;
  auto g = share(make_graded_grid(32, 0.5, 1.0));
  CHECK(alpha_of_u(const_field(g, 0.3), mp) == doctest::Approx(3.0));

  mp.gamma = 0.5;
  mp.q_exp = 2.0;
  // u = 0: integral equals |Omega| = 1
  CHECK(alpha_of_u(const_field(g, 0.0), mp) ==
        doctest::Approx(3.0 * std::pow(1.5, -2.0)).epsilon(1e-12));

  // u = 1/2: integral is 2|Omega| = 2 by hand
  mp.gamma = 1.0;
  mp.lambda = 1.0;
  CHECK(alpha_of_u(const_field(g, 0.5), mp) ==
        doctest::Approx(1.0 / 9.0).epsilon(1e-12));

  Field bad = const_field(g, 0.5);
  bad[3] = 1.0;
  CHECK_THROWS_AS(alpha_of_u(bad, mp), std::invalid_argument);
}

TEST_CASE("fixed point consistency of the two theta definitions") {
  // theta from the cubic (through U) equals (1+gamma|O|+gamma int ubar)^{2/3}
  ModelParams mp;
  mp.lambda = 2.5;
  mp.gamma = 0.7;
  mp.dim = 1;
  mp.radius = 1.0;
  auto g = share(make_graded_grid(256, 1.0, 1.0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    Field ubar(g);
    for (std::size_t j = 0; j < ubar.size(); ++j)
      ubar[j] = d(rng) * (1.0 - g->nodes[j]);
    const double direct = std::pow(
        1.0 + mp.gamma * ball_volume(mp) + mp.gamma * integrate_radial(ubar, mp),
        2.0 / 3.0);
    Field U(g);
    const double c = std::pow(mp.lambda, 1.0 / 3.0) / direct;
    for (std::size_t j = 0; j < U.size(); ++j) U[j] = c * ubar[j];
    const double via_cubic = theta_of_mu(integrate_radial(U, mp), mp);
    CHECK(via_cubic == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("finite differences of theta") {
  ThetaTrace tr;
  SUBCASE("constant trace") {
    tr.push(0.0, 0.0, 2.0);
    tr.push(0.1, 0.0, 2.0);
    tr.push(0.2, 0.0, 2.0);
    const auto out = finite_diff_theta_prime(tr);
    for (const auto& s : out.samples) CHECK(s.theta_prime == 0.0);
  }
  SUBCASE("linear trace") {
    tr.push(0.0, 0.0, 1.0);
    tr.push(0.1, 0.0, 1.1);
    tr.push(0.2, 0.0, 1.2);
    const auto out = finite_diff_theta_prime(tr);
    for (const auto& s : out.samples)
      CHECK(s.theta_prime == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("centered stencil exact on quadratics") {
    for (double t : {0.0, 0.1, 0.2}) tr.push(t, 0.0, 1.0 + t * t);
    const auto out = finite_diff_theta_prime(tr);
    CHECK(out.samples[1].theta_prime == doctest::Approx(0.2).epsilon(1e-13));
  }
  SUBCASE("too short") {
    tr.push(0.0, 0.0, 1.0);
    CHECK_THROWS_AS(finite_diff_theta_prime(tr), std::invalid_argument);
  }
}

TEST_CASE("theta trace validation") {
  ThetaTrace tr;
  tr.push(0.0, 0.1, 1.5);
  CHECK_THROWS_AS(tr.push(0.0, 0.1, 1.5), std::invalid_argument);
  tr.samples.push_back({1.0, 0.1, 0.5, 0.0});
  CHECK_THROWS_AS(tr.validate(), std::invalid_argument);
}

TEST_CASE("theta trace csv header") {
  ThetaTrace tr;
  tr.push(0.0, 0.0, 1.0);
  tr.push(1.0, 0.0, 1.0);
  const auto csv = finite_diff_theta_prime(tr).to_csv();
  CHECK(csv.rfind("t,mu,theta,theta_prime\n", 0) == 0);
}
