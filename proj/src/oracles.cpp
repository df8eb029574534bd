#include "polyqre/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyqre {

std::vector<double> fd_gradient(const std::function<double(const ReducedPoint&)>& f,
                                const ReducedPoint& x, double h) {
  std::vector<double> g;
  for (size_t i = 0; i < x.x.size(); ++i) {
    for (size_t l = 0; l < x.x[i].size(); ++l) {
      ReducedPoint plus = x;
      ReducedPoint minus = x;
      plus.x[i][l] += h;
      minus.x[i][l] -= h;
      g.push_back((f(plus) - f(minus)) / (2.0 * h));
    }
  }
  return g;
}

std::vector<double> project_bisection(const std::vector<double>& y, double lb, double ub,
                                      double tol) {
  const size_t n = y.size();
  auto point_at = [&](double theta) {
    std::vector<double> x(n);
    for (size_t j = 0; j < n; ++j) x[j] = std::max(y[j] - theta, lb);
    return x;
  };
  auto sum_at = [&](double theta) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) s += std::max(y[j] - theta, lb);
    return s;
  };
  if (sum_at(0.0) <= ub) return point_at(0.0);
  double lo = 0.0;
  double hi = lb;
  for (double v : y) hi = std::max(hi, v);
  hi = hi - lb + 1.0;  // sum_at(hi) = n * lb <= ub
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (sum_at(mid) > ub ? lo : hi) = mid;
  }
  return point_at(0.5 * (lo + hi));
}

GridSearchResult grid_qre_search(const ReducedGame& rg, const TruncatedBox& box, double tau,
                                 double grid_step) {
  const int n = rg.total_dim();
  if (n > 3) throw std::invalid_argument("grid_qre_search: total reduced dimension exceeds 3");
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_qre_search: grid_step must be positive");

  // Per-coordinate lattice values lower, lower + step, ... capped by the sum
  // constraint's loosest bound.
  std::vector<double> values;
  for (double v = box.lower; v <= box.upper() + 1e-15; v += grid_step) values.push_back(v);
  if (values.empty()) throw std::invalid_argument("grid_qre_search: empty lattice");

  std::vector<size_t> idx(n, 0);
  GridSearchResult best;
  best.residual = 1.0 / 0.0;
  while (true) {
    // Assemble the candidate and check per-player feasibility.
    ReducedPoint p;
    p.x.resize(rg.N);
    bool feasible = true;
    int c = 0;
    for (int i = 0; i < rg.N && feasible; ++i) {
      double s = 0.0;
      p.x[i].resize(rg.dims[i]);
      for (int l = 0; l < rg.dims[i]; ++l, ++c) {
        p.x[i][l] = values[idx[c]];
        s += p.x[i][l];
      }
      if (s > box.upper()) feasible = false;
    }
    if (feasible) {
      const double res = total_residual(rg, p, tau);
      if (res < best.residual) {
        best.residual = res;
        best.point = p;
      }
    }
    // Odometer step.
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == values.size()) idx[pos--] = 0;
    if (pos < 0) break;
  }
  if (!std::isfinite(best.residual))
    throw std::runtime_error("grid_qre_search: no feasible lattice point");
  return best;
}

double bisect_symmetric_qre(double q, double r, double tau, double tol) {
  auto h = [&](double x) {
    const double z = (r + q * x) / tau;
    // Stable logistic.
    const double sig = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return x - sig;
  };
  double lo = 1e-14;
  double hi = 1.0 - 1e-14;
  if (h(lo) > 0.0 || h(hi) < 0.0)
    throw std::runtime_error("bisect_symmetric_qre: no sign change on (0, 1)");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

VertexExtrema vertex_extrema(const PolymatrixGame& g, int i) {
  std::vector<int> choice(g.N, 0);
  VertexExtrema ex;
  ex.max_value = -1.0 / 0.0;
  ex.min_value = 1.0 / 0.0;
  while (true) {
    JointAction x(g.N);
    for (int k = 0; k < g.N; ++k) {
      x[k].assign(g.dims[k] + 1, 0.0);
      x[k][choice[k]] = 1.0;
    }
    const double v = utility(g, i, x);
    ex.max_value = std::max(ex.max_value, v);
    ex.min_value = std::min(ex.min_value, v);
    int pos = g.N - 1;
    while (pos >= 0 && ++choice[pos] == g.dims[pos] + 1) choice[pos--] = 0;
    if (pos < 0) break;
  }
  return ex;
}

}  // namespace polyqre
