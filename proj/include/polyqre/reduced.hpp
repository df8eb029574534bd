#pragma once

#include "polyqre/game.hpp"

namespace polyqre {

// Per-player coordinates after dropping each simplex's last coordinate.
struct ReducedPoint {
  std::vector<std::vector<double>> x;  // x[i] has length n_i
};

// Game after substituting x^{n_i+1} = 1 - sum_j x^j for every player.
// Qhat and rhat carry everything that matters for player i's own gradient;
// chat (terms linear in other players' variables) and shift (constants) are
// retained so the reduced utility can be evaluated exactly for round trips.
struct ReducedGame {
  int N = 0;
  std::vector<int> dims;                      // n_i
  std::vector<std::optional<Mat>> Qhat;       // n_i x n_k blocks, index i * N + k
  std::vector<std::vector<double>> rhat;      // length n_i
  std::vector<std::vector<double>> chat;      // index i * N + k -> length n_k
  std::vector<double> shift;                  // per-player constant
  PolymatrixGame source;                      // the game this was derived from

  bool has_q(int i, int k) const { return Qhat[static_cast<size_t>(i) * N + k].has_value(); }
  const Mat& qhat(int i, int k) const { return *Qhat[static_cast<size_t>(i) * N + k]; }
  const std::vector<double>& c(int i, int k) const { return chat[static_cast<size_t>(i) * N + k]; }

  int total_dim() const;
  std::vector<int> offsets() const;  // player-major flattening offsets
};

// Per-player truncated feasible set {x : x_j >= lower, sum_j x_j <= 1 - slack}.
// The analytic bounds underflow for small tau, so linear-domain values are
// clamped while log-domain values stay exact.
struct TruncatedBox {
  double tau = 0.0;
  double lower = 0.0;      // clamped at kLowerFloor
  double log_lower = 0.0;  // exact: -1/tau^2 - ln(max_i n_i + 1)
  double slack = 0.0;      // clamped below at kSlackFloor so 1 - slack < 1 in doubles
  double log_slack = 0.0;  // exact: -1/tau^1.5 - ln(max_i n_i + 1)

  double upper() const { return 1.0 - slack; }

  static constexpr double kLowerFloor = 1e-300;
  static constexpr double kSlackFloor = 1e-12;
};

// Regularization bounds derived from the game (Remark-2 style arithmetic).
struct TauParams {
  double epsilon = 0.0;     // resolved target gap (0 until resolved)
  double tau = 0.0;         // resolved temperature (0 until resolved)
  double tau_max = 0.0;     // min{1/delta_f, 1/delta_f^2, 1/4, 1/R^2}
  double delta_f = 0.0;
  double R = 0.0;
  bool delta_exact = true;
  double epsilon_bound = 0.0;  // tau_max * max_i ln(n_i + 1)
};

ReducedGame transform(const PolymatrixGame& g);

// Appends the eliminated coordinate 1 - sum_j x_i^j per player.
JointAction lift(const ReducedPoint& p);

// Drops each player's last coordinate.
ReducedPoint reduce_point(const JointAction& x);

ReducedPoint make_reduced_point(const std::vector<int>& dims, double fill);
std::vector<double> flatten(const ReducedPoint& p);
ReducedPoint unflatten(const std::vector<int>& dims, const std::vector<double>& v);

// Exact reduced utility f_i^t, including the linear and constant parts.
double reduced_utility(const ReducedGame& rg, int i, const ReducedPoint& p);

// g_ij(x) = rhat_i^j + sum_{k != i} <qhat_ik^j, x_k>: the unregularized part
// of the residual root.
double reduced_gradient_difference(const ReducedGame& rg, const ReducedPoint& p, int i, int j);

// Signed residual root g_ij(x) - tau ln x_i^j + tau ln(1 - sum_l x_i^l).
double residual_root(const ReducedGame& rg, const ReducedPoint& p, int i, int j, double tau);

// l_ij = root^2.
double residual_l(const ReducedGame& rg, const ReducedPoint& p, int i, int j, double tau);

// Gradient of l_ij with respect to all reduced coordinates, player-major:
// 2 * root * q_vec with q_vec as in the residual's chain rule.
std::vector<double> grad_residual(const ReducedGame& rg, const ReducedPoint& p, int i, int j,
                                  double tau);

// (1/n) sum_{i,j} l_ij with n = sum_i n_i.
double total_residual(const ReducedGame& rg, const ReducedPoint& p, double tau);

// Stacked residual roots; ||F||^2 = n * total_residual.
std::vector<double> pseudo_gradient(const ReducedGame& rg, const ReducedPoint& p, double tau);

TruncatedBox truncated_box(const std::vector<int>& dims, double tau);
TruncatedBox truncated_box(const PolymatrixGame& g, double tau);
TruncatedBox truncated_box(const ReducedGame& rg, double tau);

// delta_f, R and tau_max for the game. R maximizes the reduced coefficient
// rows over the closed reduced simplices (vertex maximization), keeping the
// result independent of tau so Table-1 arithmetic comes out exact.
TauParams tau_max_params(const PolymatrixGame& g);

// Fills epsilon/tau: tau_request <= 0 means "auto" = min(eps / max ln(n_i+1),
// 0.99 * tau_max). In strict mode an explicit tau above either bound throws.
TauParams resolve_tau(const PolymatrixGame& g, double epsilon, double tau_request, bool strict);

}  // namespace polyqre
