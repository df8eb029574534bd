#pragma once

#include <vector>

namespace polyqre {

// Euclidean projection onto {x : x_j >= lb, sum_j x_j <= ub}.
struct ProjectionResult {
  std::vector<double> point;
  std::vector<int> active_lower;  // indices clamped at lb
  bool sum_active = false;        // sum constraint tight
  double multiplier = 0.0;        // KKT shift theta >= 0 for the sum constraint
};

// Componentwise floor first; if the sum cap binds, subtract the uniform shift
// theta (with per-coordinate flooring at lb) found by a sorted breakpoint scan.
ProjectionResult project(const std::vector<double>& y, double lb, double ub);

}  // namespace polyqre
