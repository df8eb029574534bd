#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "polyqre/game.hpp"
#include "polyqre/reduced.hpp"

namespace polyqre {

// Undirected communication graph with symmetric weights; every node's
// off-diagonal mass equals 1 - beta.
struct CommGraph {
  int N = 0;
  double beta = 0.0;
  Mat W;  // N x N, zero diagonal, symmetric
  std::vector<std::pair<int, int>> edges;
};

// topology: "complete" or "ring"; weights are (1 - beta) / degree.
CommGraph build_graph(int N, const std::string& topology, double beta);

// Explicit weighted edge list (i, k, w). Weights must be symmetric-consistent
// and give every node off-diagonal mass 1 - beta; the graph must be connected.
CommGraph build_graph_custom(int N, const std::vector<std::tuple<int, int, double>>& edges,
                             double beta);

// Mixing matrix over estimate indices (i, j), n = sum_i n_i: adjacent players
// are coupled through their first estimates, estimates of the same player
// share beta / n_i, and a diagonal correction restores row sums to 1.
struct ExtendedMixing {
  int n = 0;
  Mat W;                     // n x n, symmetric, doubly stochastic
  double max_correction = 0.0;  // largest diagonal correction that was added
  std::vector<int> offsets;     // estimate-index offsets per player
};

ExtendedMixing extend(const CommGraph& g, const std::vector<int>& dims);

// One joint-action estimate per (player, own-coordinate) pair.
struct EstimateCloud {
  std::vector<int> dims;
  std::vector<ReducedPoint> est;  // length sum_i n_i, player-major

  int size() const { return static_cast<int>(est.size()); }
};

EstimateCloud make_cloud(const std::vector<int>& dims, const ReducedPoint& value);

// One synchronous averaging round x <- W' x.
EstimateCloud mix(const ExtendedMixing& M, const EstimateCloud& cloud);

// Max pairwise infinity-norm distance between estimates.
double disagreement(const EstimateCloud& cloud);

// Mean of all estimates (coordinate-wise).
ReducedPoint cloud_mean(const EstimateCloud& cloud);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> sym_eigenvalues(const Mat& S);

// Second-largest eigenvalue modulus of the mixing matrix.
double lambda2(const ExtendedMixing& M);

}  // namespace polyqre
