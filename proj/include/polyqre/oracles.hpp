#pragma once

#include <functional>
#include <vector>

#include "polyqre/reduced.hpp"

namespace polyqre {

// Independent numerical oracles used by tests; none of these share
// implementation with the routines they check.

// Central differences (f(x + h e) - f(x - h e)) / 2h per reduced coordinate.
std::vector<double> fd_gradient(const std::function<double(const ReducedPoint&)>& f,
                                const ReducedPoint& x, double h);

// Projection onto {x >= lb, sum x <= ub} by bisecting the KKT shift.
std::vector<double> project_bisection(const std::vector<double>& y, double lb, double ub,
                                      double tol);

struct GridSearchResult {
  ReducedPoint point;
  double residual = 0.0;
};

// Exhaustive argmin of total_residual over the lattice {lower + m * grid_step}
// intersected with the box (total reduced dimension <= 3).
GridSearchResult grid_qre_search(const ReducedGame& rg, const TruncatedBox& box, double tau,
                                 double grid_step);

// Root of x - sigma((r + q x) / tau) on [lb, ub] by bisection; the symmetric
// two-player scalar fixed point.
double bisect_symmetric_qre(double q, double r, double tau, double tol);

struct VertexExtrema {
  double max_value = 0.0;
  double min_value = 0.0;
};

// Extrema of f_i over all joint pure profiles.
VertexExtrema vertex_extrema(const PolymatrixGame& g, int i);

}  // namespace polyqre
