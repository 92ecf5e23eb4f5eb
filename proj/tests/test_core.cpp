#include <cmath>
#include <numbers>
#include <random>

#include "core/types.hpp"
#include "doctest.h"

using namespace mq;

TEST_CASE("ball volume matches the closed forms") {
  ModelParams mp;
  mp.dim = 1;
  mp.radius = 1.0;
  CHECK(ball_volume(mp) == doctest::Approx(2.0).epsilon(1e-14));
  mp.dim = 2;
  CHECK(ball_volume(mp) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  mp.dim = 3;
  CHECK(ball_volume(mp) ==
        doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
}

TEST_CASE("ball volume scales like R^n") {
  for (int n = 1; n <= 5; ++n)
    for (double R : {0.5, 1.0, 2.0}) {
      ModelParams unit;
      unit.dim = n;
      unit.radius = 1.0;
      ModelParams scaled = unit;
      scaled.radius = R;
      CHECK(ball_volume(scaled) ==
            doctest::Approx(ball_volume(unit) * std::pow(R, n)).epsilon(1e-13));
    }
}

TEST_CASE("graded grid formula") {
  const RadialGrid g = make_graded_grid(16, 1.0, 1.0);
  CHECK(g.nodes.size() == 17);
  CHECK(g.nodes[0] == 0.0);
  CHECK(g.nodes[4] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.nodes[16] == 1.0);

  const RadialGrid c = make_graded_grid(16, 1.0, 3.0);
  CHECK(c.nodes[1] == doctest::Approx(1.0 / 4096.0).epsilon(1e-14));

  CHECK_THROWS_AS(make_graded_grid(8, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_graded_grid(32, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("graded grid is strictly monotone for random M, cluster") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> Md(16, 400);
  std::uniform_real_distribution<double> cd(1.0, 4.0);
  for (int rep = 0; rep < 50; ++rep) {
    const RadialGrid g = make_graded_grid(Md(rng), 2.0, cd(rng));
    for (std::size_t j = 1; j < g.nodes.size(); ++j)
      REQUIRE(g.nodes[j] > g.nodes[j - 1]);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 2.0);
  }
}

TEST_CASE("parameter validation") {
  ModelParams mp;
  mp.lambda = -1.0;
  CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
  mp.lambda = 1.0;
  mp.dim = 0;
  CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
  mp.dim = 1;
  mp.p_exp = 0.2;  // dim - 2/(p+1) < 0 in general mode
  CHECK_THROWS_AS(mp.validate(true), std::invalid_argument);
  CHECK_NOTHROW(mp.validate(false));

  RunConfig rc;
  rc.quench_stop = 0.5;
  CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
}

TEST_CASE("field validation catches non-finite values") {
  auto g = share(make_graded_grid(16, 1.0, 1.0));
  Field f(g);
  f[3] = std::nan("");
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_CASE("grid gradient is exact on quadratics") {
  const RadialGrid g = make_graded_grid(32, 1.0, 2.0);
  std::vector<double> v(g.nodes.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = 3.0 * g.nodes[j] * g.nodes[j] - 2.0 * g.nodes[j] + 1.0;
  const auto dv = grid_gradient(g, v);
  for (std::size_t j = 0; j < v.size(); ++j)
    CHECK(dv[j] == doctest::Approx(6.0 * g.nodes[j] - 2.0).epsilon(1e-9));
}
