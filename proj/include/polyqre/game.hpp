#pragma once

#include <optional>
#include <string>
#include <vector>

namespace polyqre {

// Dense row-major matrix; just enough surface for payoff blocks.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

// Mixed strategy over the n_i+1 actions of one player.
using SimplexVector = std::vector<double>;

// One mixed strategy per player.
using JointAction = std::vector<SimplexVector>;

// Polymatrix game on a product of simplices:
//   f_i(x) = sum_{k != i} x_i' Q_ik x_k + sum_j r_j' x_j.
// dims stores n_i; the full simplex of player i has n_i + 1 coordinates.
struct PolymatrixGame {
  int N = 0;
  std::vector<int> dims;
  std::vector<std::optional<Mat>> Q;  // index (i, k) -> i * N + k; unused when i == k
  std::vector<std::vector<double>> r;

  bool has_q(int i, int k) const { return Q[static_cast<size_t>(i) * N + k].has_value(); }
  const Mat& q(int i, int k) const { return *Q[static_cast<size_t>(i) * N + k]; }
  Mat& q_mut(int i, int k) { return *Q[static_cast<size_t>(i) * N + k]; }
  void set_q(int i, int k, Mat m) { Q[static_cast<size_t>(i) * N + k] = std::move(m); }
};

// Exact best response data for one player at a joint action.
struct BestResponseResult {
  std::vector<double> coefficients;  // c = r_i + sum_{k != i} Q_ik x_k
  double best_value = 0.0;           // max_j c_j (linear in x_i, so vertex-attained)
  double current_value = 0.0;        // <c, x_i>
  double gap = 0.0;                  // best_value - current_value
};

struct DeltaF {
  double value = 0.0;
  bool exact = true;  // false when the enumeration cap forced the interval bound
};

PolymatrixGame make_zero_game(int N, const std::vector<int>& dims);

// Built-in 2x2 anti-coordination game (two drivers choosing go/stop):
// row player payoffs [[-6, 1], [-4, 0]], symmetric for the column player.
PolymatrixGame make_table1_game();

// Multiplies every Q block and every r vector by factor, in place.
void scale_utilities(PolymatrixGame& g, double factor);

// Returns one description per violated structural invariant; empty means valid.
std::vector<std::string> validate_game(const PolymatrixGame& g);

bool is_valid_simplex(const SimplexVector& x, double tol = 1e-12);

double utility(const PolymatrixGame& g, int i, const JointAction& x);

BestResponseResult best_response(const PolymatrixGame& g, int i, const JointAction& x);

// Max best-response gap over players; x is an eps-NE iff this is <= eps.
double epsilon_gap(const PolymatrixGame& g, const JointAction& x);

// Utility spread delta_f = max_i (max_x f_i - min_x f_i). Extrema of a
// multilinear function over a product of simplices occur at joint vertices,
// so the exact path enumerates them; above the cap an interval upper bound
// is returned with exact = false.
DeltaF delta_f(const PolymatrixGame& g, long long enumeration_cap = 1000000);

}  // namespace polyqre
