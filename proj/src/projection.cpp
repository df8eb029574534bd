#include "polyqre/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polyqre {

ProjectionResult project(const std::vector<double>& y, double lb, double ub) {
  const int n = static_cast<int>(y.size());
  if (!(lb >= 0.0) || !(n * lb < ub) || !(ub <= 1.0))
    throw std::invalid_argument("project: infeasible box (need 0 <= lb, n*lb < ub <= 1)");

  ProjectionResult res;
  res.point.resize(n);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    res.point[j] = std::max(y[j], lb);
    sum += res.point[j];
  }
  if (sum <= ub) {
    for (int j = 0; j < n; ++j)
      if (y[j] <= lb) res.active_lower.push_back(j);
    return res;
  }

  // Sum cap binds: find theta > 0 with sum_j max(y_j - theta, lb) = ub.
  // With s_j = y_j - lb and budget = ub - n*lb this is the capped-simplex
  // shift: sum_j max(s_j - theta, 0) = budget, solved by a sorted scan.
  const double budget = ub - n * lb;
  std::vector<double> s(n);
  for (int j = 0; j < n; ++j) s[j] = y[j] - lb;
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  double prefix = 0.0;
  double theta = 0.0;
  for (int k = 1; k <= n; ++k) {
    prefix += sorted[k - 1];
    const double cand = (prefix - budget) / k;
    const double lo = (k == n) ? -1.0 / 0.0 : sorted[k];
    if (cand >= lo && cand <= sorted[k - 1]) {
      theta = cand;
      break;
    }
  }

  res.sum_active = true;
  res.multiplier = theta;
  for (int j = 0; j < n; ++j) {
    if (s[j] - theta > 0.0) {
      res.point[j] = lb + (s[j] - theta);
    } else {
      res.point[j] = lb;
      res.active_lower.push_back(j);
    }
  }

  // When y is many orders of magnitude above the box, s - theta cancels and
  // the rounded sum can land just above ub; trim the excess off the largest
  // coordinate so the output is feasible for arbitrary inputs.
  double total = 0.0;
  for (double v : res.point) total += v;
  if (total > ub) {
    int arg = 0;
    for (int j = 1; j < n; ++j)
      if (res.point[j] > res.point[arg]) arg = j;
    res.point[arg] = std::max(lb, res.point[arg] - (total - ub));
  }
  return res;
}

}  // namespace polyqre
