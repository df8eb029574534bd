#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "polyqre/game.hpp"
#include "polyqre/io.hpp"
#include "polyqre/oracles.hpp"
#include "polyqre/reduced.hpp"
#include "polyqre/rng.hpp"

using namespace polyqre;

namespace {

// Interior point with every coordinate (and the eliminated remainder) at
// least margin away from zero.
ReducedPoint random_interior(const std::vector<int>& dims, Rng& rng, double margin = 5e-3) {
  ReducedPoint p;
  p.x.resize(dims.size());
  for (size_t i = 0; i < dims.size(); ++i) {
    while (true) {
      const std::vector<double> full = rng.dirichlet(dims[i] + 1);
      double mn = 1.0;
      for (double v : full) mn = std::min(mn, v);
      if (mn < margin) continue;
      p.x[i].assign(full.begin(), full.end() - 1);
      break;
    }
  }
  return p;
}

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return var / v.size();
}

}  // namespace

TEST_CASE("transform of the anti-coordination game") {
  const ReducedGame rg = transform(make_table1_game());
  REQUIRE(rg.N == 2);
  CHECK(rg.qhat(0, 1).at(0, 0) == -3.0);  // -6 - 1 - (-4) + 0
  CHECK(rg.qhat(1, 0).at(0, 0) == -3.0);
  CHECK(rg.rhat[0][0] == 1.0);
  CHECK(rg.rhat[1][0] == 1.0);
  CHECK(rg.c(0, 1)[0] == -4.0);  // (Q[1,0] - Q[1,1]) + (r_2[0] - r_2[1])
  CHECK(rg.shift[0] == 0.0);
  CHECK(rg.shift[1] == 0.0);
}

TEST_CASE("zero game transforms to all zeros") {
  const ReducedGame rg = transform(make_zero_game(3, {2, 1, 2}));
  for (int i = 0; i < rg.N; ++i) {
    for (double v : rg.rhat[i]) CHECK(v == 0.0);
    CHECK(rg.shift[i] == 0.0);
    for (int k = 0; k < rg.N; ++k) {
      if (i == k) continue;
      for (double v : rg.qhat(i, k).data) CHECK(v == 0.0);
      for (double v : rg.c(i, k)) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("transform rejects invalid games") {
  PolymatrixGame g = make_zero_game(2, {1, 1});
  g.Q[1].reset();
  CHECK_THROWS_AS(transform(g), std::invalid_argument);
}

TEST_CASE("reduced utility differs from the full utility by a constant only") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const int N = 2 + static_cast<int>(rng.raw() % 2);
    std::vector<int> dims(N);
    for (int& d : dims) d = 1 + static_cast<int>(rng.raw() % 3);
    const PolymatrixGame g = trial == 0 ? make_table1_game()
                                        : gen_random_game(N, dims, 4.0, 600 + trial);
    const ReducedGame rg = transform(g);
    for (int i = 0; i < g.N; ++i) {
      std::vector<double> diffs;
      for (int t = 0; t < 50; ++t) {
        const ReducedPoint x = random_interior(g.dims, rng);
        diffs.push_back(utility(g, i, lift(x)) - reduced_utility(rg, i, x));
      }
      CHECK(variance(diffs) <= 1e-18);
    }
  }
}

TEST_CASE("lift appends the eliminated coordinate") {
  const JointAction a = lift(ReducedPoint{{{0.25}}});
  REQUIRE(a.size() == 1);
  CHECK(a[0] == std::vector<double>{0.25, 0.75});

  const JointAction b = lift(ReducedPoint{{{1.0 / 3.0}, {1.0 / 3.0}}});
  CHECK(b[0][0] == doctest::Approx(1.0 / 3.0));
  CHECK(b[0][1] == doctest::Approx(2.0 / 3.0));
  CHECK(b[1][1] == doctest::Approx(2.0 / 3.0));

  const JointAction c = lift(ReducedPoint{{{0.2, 0.3}}});
  CHECK(c[0][2] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(lift(ReducedPoint{{{0.7, 0.7}}}), std::invalid_argument);
}

TEST_CASE("reduce_point inverts lift") {
  Rng rng(9);
  const std::vector<int> dims = {2, 3};
  for (int t = 0; t < 10; ++t) {
    const ReducedPoint x = random_interior(dims, rng);
    const ReducedPoint back = reduce_point(lift(x));
    for (size_t i = 0; i < x.x.size(); ++i)
      for (size_t l = 0; l < x.x[i].size(); ++l) CHECK(back.x[i][l] == x.x[i][l]);
  }
}

TEST_CASE("flatten and unflatten are inverse, offsets are player-major") {
  const std::vector<int> dims = {2, 1, 3};
  const ReducedPoint p = {{{0.1, 0.2}, {0.3}, {0.05, 0.1, 0.15}}};
  const std::vector<double> flat = flatten(p);
  REQUIRE(flat.size() == 6);
  CHECK(flat[2] == 0.3);
  const ReducedPoint back = unflatten(dims, flat);
  CHECK(back.x[2][1] == 0.1);

  const ReducedGame rg = transform(make_zero_game(3, dims));
  CHECK(rg.total_dim() == 6);
  CHECK(rg.offsets() == std::vector<int>{0, 2, 3, 6});
}

TEST_CASE("reduced gradient difference on the anti-coordination game") {
  const ReducedGame rg = transform(make_table1_game());
  CHECK(reduced_gradient_difference(rg, {{{0.5}, {1.0 / 3.0}}}, 0, 0) ==
        doctest::Approx(0.0).scale(1).epsilon(1e-14));  // 1 - 3 * (1/3)
  CHECK(reduced_gradient_difference(rg, {{{0.5}, {0.0}}}, 0, 0) == 1.0);
  const ReducedGame zg = transform(make_zero_game(2, {2, 2}));
  CHECK(reduced_gradient_difference(zg, {{{0.2, 0.3}, {0.1, 0.4}}}, 1, 1) == 0.0);
}

TEST_CASE("residual root at the uniform mixed point") {
  const ReducedGame rg = transform(make_table1_game());
  const ReducedPoint x = {{{1.0 / 3.0}, {1.0 / 3.0}}};
  CHECK(residual_root(rg, x, 0, 0, 0.1) == doctest::Approx(0.1 * std::log(2.0)).epsilon(1e-13));
  CHECK(residual_root(rg, x, 0, 0, 0.0) == doctest::Approx(0.0).scale(1).epsilon(1e-14));
}

TEST_CASE("residual root vanishes when the entropy terms cancel and g is zero") {
  const ReducedGame zg = transform(make_zero_game(1, {2}));
  // x_1^1 equals the remainder 1 - 0.25 - 0.5 = 0.25 (exactly, in binary),
  // so the two entropy logs cancel.
  CHECK(residual_root(zg, {{{0.25, 0.5}}}, 0, 0, 0.7) == 0.0);
}

TEST_CASE("residual root reports log-domain violations by coordinate") {
  const ReducedGame rg = transform(make_table1_game());
  CHECK_THROWS_WITH_AS(residual_root(rg, {{{0.0}, {0.5}}}, 0, 0, 0.1),
                       doctest::Contains("player 1, coordinate 1"), std::domain_error);
  CHECK_THROWS_AS(residual_root(rg, {{{1.0}, {0.5}}}, 0, 0, 0.1), std::domain_error);
}

TEST_CASE("squared residual at the uniform mixed point") {
  const ReducedGame rg = transform(make_table1_game());
  const ReducedPoint x = {{{1.0 / 3.0}, {1.0 / 3.0}}};
  const double expect = 0.1 * std::log(2.0) * 0.1 * std::log(2.0);  // about 4.805e-3
  CHECK(residual_l(rg, x, 0, 0, 0.1) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(residual_l(rg, x, 0, 0, 0.0) == doctest::Approx(0.0).scale(1).epsilon(1e-25));
}

TEST_CASE("residuals vanish at the oracle fixed point") {
  const ReducedGame rg = transform(make_table1_game());
  const double xs = bisect_symmetric_qre(-3.0, 1.0, 0.05, 1e-15);
  const ReducedPoint x = {{{xs}, {xs}}};
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) sum += residual_l(rg, x, i, 0, 0.05);
  CHECK(sum <= 1e-16);
  // Stacked pseudo-gradient is correspondingly tiny.
  const std::vector<double> f = pseudo_gradient(rg, x, 0.05);
  for (double v : f) CHECK(std::abs(v) <= 1e-8);
}

TEST_CASE("residual gradient at the uniform mixed point") {
  const ReducedGame rg = transform(make_table1_game());
  const ReducedPoint x = {{{1.0 / 3.0}, {1.0 / 3.0}}};
  const std::vector<double> grad = grad_residual(rg, x, 0, 0, 0.1);
  REQUIRE(grad.size() == 2);
  const double root = 0.1 * std::log(2.0);
  CHECK(grad[0] == doctest::Approx(2.0 * root * -0.45).epsilon(1e-10));  // -tau/x - tau/rem
  CHECK(grad[1] == doctest::Approx(2.0 * root * -3.0).epsilon(1e-10));
}

TEST_CASE("residual gradient is zero exactly at a zero root") {
  const ReducedGame zg = transform(make_zero_game(1, {2}));
  const std::vector<double> grad = grad_residual(zg, {{{0.25, 0.5}}}, 0, 0, 0.7);
  for (double v : grad) CHECK(v == 0.0);
}

TEST_CASE("residual gradient matches central differences") {
  Rng rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const int N = 2 + trial % 2;
    std::vector<int> dims(N);
    for (int& d : dims) d = 1 + static_cast<int>(rng.raw() % 4);
    const PolymatrixGame g = gen_random_game(N, dims, 2.0, 700 + trial);
    const ReducedGame rg = transform(g);
    const double tau = 0.3;
    for (int t = 0; t < 5; ++t) {
      const ReducedPoint x = random_interior(dims, rng);
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < dims[i]; ++j) {
          const std::vector<double> an = grad_residual(rg, x, i, j, tau);
          const std::vector<double> fd = fd_gradient(
              [&](const ReducedPoint& p) { return residual_l(rg, p, i, j, tau); }, x, 1e-6);
          double num = 0.0, den = 0.0;
          for (size_t c = 0; c < an.size(); ++c) {
            num += (an[c] - fd[c]) * (an[c] - fd[c]);
            den += an[c] * an[c];
          }
          CHECK(std::sqrt(num) <= 1e-5 * std::max(std::sqrt(den), 1e-6));
        }
      }
    }
  }
}

TEST_CASE("gradient norm and residual vanish together") {
  Rng rng(37);
  const PolymatrixGame g = gen_random_game(2, {2, 2}, 2.0, 800);
  const ReducedGame rg = transform(g);
  const double tau = 0.2;
  for (int t = 0; t < 50; ++t) {
    const ReducedPoint x = random_interior(g.dims, rng);
    for (int i = 0; i < g.N; ++i) {
      for (int j = 0; j < g.dims[i]; ++j) {
        const double l = residual_l(rg, x, i, j, tau);
        double n2 = 0.0;
        for (double v : grad_residual(rg, x, i, j, tau)) n2 += v * v;
        CHECK((std::sqrt(n2) <= 1e-10) == (l <= 1e-20));
      }
    }
  }
}

TEST_CASE("pseudo-gradient stacks the roots and squares to n times the total residual") {
  Rng rng(41);
  const PolymatrixGame g = gen_random_game(3, {2, 1, 3}, 3.0, 900);
  const ReducedGame rg = transform(g);
  const double tau = 0.15;
  for (int t = 0; t < 10; ++t) {
    const ReducedPoint x = random_interior(g.dims, rng);
    const std::vector<double> f = pseudo_gradient(rg, x, tau);
    REQUIRE(static_cast<int>(f.size()) == rg.total_dim());
    int c = 0;
    double norm2 = 0.0;
    for (int i = 0; i < g.N; ++i)
      for (int j = 0; j < g.dims[i]; ++j, ++c) {
        CHECK(f[c] == residual_root(rg, x, i, j, tau));
        norm2 += f[c] * f[c];
      }
    const double total = total_residual(rg, x, tau);
    CHECK(norm2 == doctest::Approx(rg.total_dim() * total).epsilon(1e-13));
  }
}

TEST_CASE("total residual of the zero game by direct formula") {
  const ReducedGame zg = transform(make_zero_game(2, {1, 1}));
  // Centroid: both log arguments equal, every root is zero.
  CHECK(total_residual(zg, {{{0.5}, {0.5}}}, 0.1) == 0.0);
  // x = 1/3 per coordinate leaves remainder 2/3: each root is tau ln 2.
  const double root = 0.1 * std::log(2.0);
  CHECK(total_residual(zg, {{{1.0 / 3.0}, {1.0 / 3.0}}}, 0.1) ==
        doctest::Approx(root * root).epsilon(1e-12));
  const ReducedGame rg = transform(make_table1_game());
  CHECK(total_residual(rg, {{{1.0 / 3.0}, {1.0 / 3.0}}}, 0.0) ==
        doctest::Approx(0.0).scale(1).epsilon(1e-25));
}

TEST_CASE("residual root is equivariant under relabeling another player's actions") {
  const PolymatrixGame g = gen_random_game(2, {2, 3}, 2.0, 1000);
  // Swap player 2's first two actions everywhere they appear.
  PolymatrixGame h = g;
  Mat& q12 = h.q_mut(0, 1);
  for (int r = 0; r < q12.rows; ++r) std::swap(q12.at(r, 0), q12.at(r, 1));
  Mat& q21 = h.q_mut(1, 0);
  for (int c = 0; c < q21.cols; ++c) std::swap(q21.at(0, c), q21.at(1, c));
  std::swap(h.r[1][0], h.r[1][1]);

  const ReducedGame rg = transform(g);
  const ReducedGame rh = transform(h);
  Rng rng(43);
  for (int t = 0; t < 10; ++t) {
    const ReducedPoint x = random_interior(g.dims, rng);
    ReducedPoint y = x;
    std::swap(y.x[1][0], y.x[1][1]);
    for (int j = 0; j < 2; ++j)
      CHECK(residual_root(rh, y, 0, j, 0.2) ==
            doctest::Approx(residual_root(rg, x, 0, j, 0.2)).epsilon(1e-12));
  }
}

TEST_CASE("truncated box at moderate temperature") {
  const TruncatedBox box = truncated_box(std::vector<int>{1, 1}, 0.5);
  CHECK(box.lower == doctest::Approx(std::exp(-4.0) / 2.0).epsilon(1e-14));
  CHECK(box.slack == doctest::Approx(std::exp(-std::pow(2.0, 1.5)) / 2.0).epsilon(1e-14));
  CHECK(box.lower == doctest::Approx(9.158e-3).epsilon(1e-4));
  CHECK(box.slack == doctest::Approx(2.956e-2).epsilon(1e-3));
  CHECK(box.upper() == 1.0 - box.slack);
  CHECK(box.log_lower == doctest::Approx(-4.0 - std::log(2.0)).epsilon(1e-15));
  CHECK(box.log_slack == doctest::Approx(-std::pow(2.0, 1.5) - std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("truncated box clamps underflowed bounds but keeps exact logs") {
  const TruncatedBox box = truncated_box(std::vector<int>{1}, 0.02);
  CHECK(box.lower == TruncatedBox::kLowerFloor);
  CHECK(box.log_lower == doctest::Approx(-2500.0 - std::log(2.0)).epsilon(1e-15));
  CHECK(box.slack == TruncatedBox::kSlackFloor);
  CHECK(box.upper() < 1.0);
}

TEST_CASE("log lower bound is monotone in the temperature") {
  double prev = -1.0 / 0.0;
  for (double tau : {0.02, 0.05, 0.1, 0.2, 0.5, 1.0}) {
    const TruncatedBox box = truncated_box(std::vector<int>{2}, tau);
    CHECK(box.log_lower > prev);
    prev = box.log_lower;
  }
}

TEST_CASE("truncated box rejects nonpositive temperatures") {
  CHECK_THROWS_AS(truncated_box(std::vector<int>{1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(truncated_box(std::vector<int>{1}, -0.1), std::invalid_argument);
}

TEST_CASE("temperature bounds for the anti-coordination game are exact") {
  const TauParams tp = tau_max_params(make_table1_game());
  CHECK(tp.delta_f == 7.0);
  CHECK(tp.delta_exact);
  CHECK(tp.R == 1.0);
  CHECK(tp.tau_max == 1.0 / 49.0);
  CHECK(tp.epsilon_bound == doctest::Approx(std::log(2.0) / 49.0).epsilon(1e-15));
}

TEST_CASE("degenerate zero game drops the spread terms from tau_max") {
  const TauParams tp = tau_max_params(make_zero_game(2, {1, 1}));
  CHECK(tp.delta_f == 0.0);
  CHECK(tp.R == 0.0);
  CHECK(tp.tau_max == 0.25);
}

TEST_CASE("tau resolution: auto mode and strict refusal") {
  const PolymatrixGame g = make_table1_game();
  const TauParams autop = resolve_tau(g, 0.05, -1.0, false);
  CHECK(autop.tau == doctest::Approx(0.99 / 49.0).epsilon(1e-14));
  // A larger target gap makes the Lemma cap the binding constraint only when
  // smaller than 0.99 * tau_max; for epsilon = 0.01 it is.
  const TauParams tight = resolve_tau(g, 0.01, -1.0, false);
  CHECK(tight.tau == doctest::Approx(0.01 / std::log(2.0)).epsilon(1e-14));

  CHECK(resolve_tau(g, 0.05, 0.05, false).tau == 0.05);  // tolerated when not strict
  CHECK_THROWS_WITH_AS(resolve_tau(g, 0.05, 0.05, true), doctest::Contains("admissible"),
                       std::invalid_argument);
  CHECK_THROWS_AS(resolve_tau(g, 0.0, 0.05, false), std::invalid_argument);
}
