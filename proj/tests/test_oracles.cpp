#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "polyqre/algorithms.hpp"
#include "polyqre/io.hpp"
#include "polyqre/oracles.hpp"
#include "polyqre/rng.hpp"

using namespace polyqre;

TEST_CASE("central differences on a quadratic bowl") {
  const auto bowl = [](const ReducedPoint& p) {
    double s = 0.0;
    for (const auto& block : p.x)
      for (double v : block) s += v * v;
    return s;
  };
  const std::vector<double> g = fd_gradient(bowl, {{{1.0, 0.5}}}, 1e-6);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("central differences of a constant are exactly zero") {
  const std::vector<double> g =
      fd_gradient([](const ReducedPoint&) { return 3.7; }, {{{0.2}, {0.4, 0.1}}}, 1e-6);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("bisection projection reproduces the closed-form examples") {
  const std::vector<double> a = project_bisection({0.9, 0.9}, 0.01, 0.98, 1e-13);
  CHECK(a[0] == doctest::Approx(0.49).epsilon(1e-9));
  CHECK(a[1] == doctest::Approx(0.49).epsilon(1e-9));

  const std::vector<double> b = project_bisection({0.2, 0.3}, 0.1, 1.0, 1e-13);
  CHECK(b[0] == 0.2);
  CHECK(b[1] == 0.3);

  const std::vector<double> c = project_bisection({-1.0, 2.0}, 0.1, 1.0, 1e-13);
  CHECK(c[0] == doctest::Approx(0.1).scale(1).epsilon(1e-9));
  CHECK(c[1] == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("one-dimensional projection is a clamp") {
  CHECK(project_bisection({0.5}, 0.1, 0.3, 1e-13)[0] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(project_bisection({0.05}, 0.1, 0.3, 1e-13)[0] == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(project_bisection({0.2}, 0.1, 0.3, 1e-13)[0] == 0.2);
}

TEST_CASE("grid search localizes the symmetric fixed point of the built-in game") {
  const PolymatrixGame g = make_table1_game();
  const ReducedGame rg = transform(g);
  const double tau = 0.05;
  const TruncatedBox box = truncated_box(g, tau);
  const GridSearchResult res = grid_qre_search(rg, box, tau, 1e-3);
  const double oracle = bisect_symmetric_qre(-3.0, 1.0, tau, 1e-12);
  CHECK(res.point.x[0][0] == doctest::Approx(oracle).epsilon(3e-3));
  CHECK(res.point.x[1][0] == doctest::Approx(oracle).epsilon(3e-3));
  CHECK(std::abs(res.point.x[0][0] - 0.3442) <= 1e-3);
  CHECK(std::abs(res.point.x[1][0] - 0.3442) <= 1e-3);
}

TEST_CASE("grid search on the zero game finds the uniform profile") {
  const PolymatrixGame g = make_zero_game(2, {1, 1});
  const ReducedGame rg = transform(g);
  const TruncatedBox box = truncated_box(g, 0.1);
  const GridSearchResult res = grid_qre_search(rg, box, 0.1, 0.01);
  CHECK(std::abs(res.point.x[0][0] - 0.5) <= 0.01);
  CHECK(std::abs(res.point.x[1][0] - 0.5) <= 0.01);
}

TEST_CASE("the grid argmin beats random feasible points") {
  const PolymatrixGame g = make_table1_game();
  const ReducedGame rg = transform(g);
  const double tau = 0.05;
  const TruncatedBox box = truncated_box(g, tau);
  const GridSearchResult res = grid_qre_search(rg, box, tau, 5e-3);
  Rng rng(47);
  for (int t = 0; t < 100; ++t) {
    const ReducedPoint p = random_box_point(g.dims, box, rng);
    CHECK(res.residual <= total_residual(rg, p, tau) + 1e-15);
  }
}

TEST_CASE("grid search guards its own applicability") {
  const PolymatrixGame big = make_zero_game(2, {2, 2});
  const ReducedGame rg = transform(big);
  const TruncatedBox box = truncated_box(big, 0.1);
  CHECK_THROWS_AS(grid_qre_search(rg, box, 0.1, 0.01), std::invalid_argument);

  const PolymatrixGame small = make_zero_game(1, {1});
  CHECK_THROWS_AS(
      grid_qre_search(transform(small), truncated_box(small, 0.1), 0.1, 0.0),
      std::invalid_argument);
}

TEST_CASE("scalar bisection solves the symmetric logit fixed point") {
  CHECK(bisect_symmetric_qre(-3.0, 1.0, 0.05, 1e-12) == doctest::Approx(0.3442).epsilon(3e-4));
  CHECK(bisect_symmetric_qre(-3.0, 1.0, 0.1, 1e-12) == doctest::Approx(0.353).epsilon(3e-3));
  CHECK(bisect_symmetric_qre(0.0, 0.0, 0.1, 1e-12) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("the bisection output is a genuine fixed point") {
  for (double tau : {0.05, 0.1, 0.3}) {
    const double x = bisect_symmetric_qre(-3.0, 1.0, tau, 1e-13);
    const double z = (1.0 - 3.0 * x) / tau;
    const double sigma = 1.0 / (1.0 + std::exp(-z));
    CHECK(x == doctest::Approx(sigma).epsilon(1e-9));
  }
}

TEST_CASE("vertex extrema of the built-in and zero games") {
  const PolymatrixGame g = make_table1_game();
  const VertexExtrema e0 = vertex_extrema(g, 0);
  CHECK(e0.max_value == 1.0);
  CHECK(e0.min_value == -6.0);
  const VertexExtrema e1 = vertex_extrema(g, 1);
  CHECK(e1.max_value == 1.0);
  CHECK(e1.min_value == -6.0);

  const PolymatrixGame z = make_zero_game(2, {2, 1});
  const VertexExtrema ez = vertex_extrema(z, 0);
  CHECK(ez.max_value == 0.0);
  CHECK(ez.min_value == 0.0);
}

TEST_CASE("vertex extrema bound the utility at mixed points") {
  Rng rng(53);
  const PolymatrixGame g = gen_random_game(3, {2, 1, 2}, 2.0, 5000);
  for (int i = 0; i < g.N; ++i) {
    const VertexExtrema e = vertex_extrema(g, i);
    for (int t = 0; t < 50; ++t) {
      JointAction x;
      for (int d : g.dims) x.push_back(rng.dirichlet(d + 1));
      const double u = utility(g, i, x);
      CHECK(u <= e.max_value + 1e-12);
      CHECK(u >= e.min_value - 1e-12);
    }
  }
}
