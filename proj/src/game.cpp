#include "polyqre/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyqre {

namespace {

void check_joint_action(const PolymatrixGame& g, const JointAction& x, const char* who) {
  if (static_cast<int>(x.size()) != g.N)
    throw std::invalid_argument(std::string(who) + ": joint action has wrong player count");
  for (int i = 0; i < g.N; ++i) {
    if (static_cast<int>(x[i].size()) != g.dims[i] + 1)
      throw std::invalid_argument(std::string(who) + ": player " + std::to_string(i + 1) +
                                  " strategy has wrong length");
  }
}

}  // namespace

PolymatrixGame make_zero_game(int N, const std::vector<int>& dims) {
  PolymatrixGame g;
  g.N = N;
  g.dims = dims;
  g.Q.resize(static_cast<size_t>(N) * N);
  g.r.resize(N);
  for (int i = 0; i < N; ++i) {
    g.r[i].assign(dims[i] + 1, 0.0);
    for (int k = 0; k < N; ++k)
      if (i != k) g.set_q(i, k, Mat(dims[i] + 1, dims[k] + 1, 0.0));
  }
  return g;
}

PolymatrixGame make_table1_game() {
  PolymatrixGame g = make_zero_game(2, {1, 1});
  // Bimatrix payoffs (go, stop) x (go, stop): A = [[-6, 1], [-4, 0]] for the
  // row player and A' for the column player. In the f_i = x_i' Q_ik x_k
  // convention both coupling blocks equal A.
  Mat a(2, 2);
  a.at(0, 0) = -6.0;
  a.at(0, 1) = 1.0;
  a.at(1, 0) = -4.0;
  a.at(1, 1) = 0.0;
  g.set_q(0, 1, a);
  g.set_q(1, 0, a);
  return g;
}

void scale_utilities(PolymatrixGame& g, double factor) {
  for (auto& q : g.Q)
    if (q)
      for (auto& v : q->data) v *= factor;
  for (auto& r : g.r)
    for (auto& v : r) v *= factor;
}

std::vector<std::string> validate_game(const PolymatrixGame& g) {
  std::vector<std::string> out;
  if (g.N < 1) {
    out.push_back("player count must be >= 1");
    return out;
  }
  if (static_cast<int>(g.dims.size()) != g.N) out.push_back("dims length != player count");
  if (static_cast<int>(g.r.size()) != g.N) out.push_back("r length != player count");
  if (g.Q.size() != static_cast<size_t>(g.N) * g.N) out.push_back("Q table has wrong size");
  if (!out.empty()) return out;

  for (int i = 0; i < g.N; ++i) {
    if (g.dims[i] < 1) out.push_back("player " + std::to_string(i + 1) + ": dimension must be >= 1");
    if (static_cast<int>(g.r[i].size()) != g.dims[i] + 1)
      out.push_back("player " + std::to_string(i + 1) + ": r has length " +
                    std::to_string(g.r[i].size()) + ", expected " + std::to_string(g.dims[i] + 1));
    for (int k = 0; k < g.N; ++k) {
      if (i == k) continue;
      if (!g.has_q(i, k)) {
        out.push_back("missing coupling block Q(" + std::to_string(i + 1) + "," +
                      std::to_string(k + 1) + ")");
        continue;
      }
      const Mat& m = g.q(i, k);
      if (m.rows != g.dims[i] + 1 || m.cols != g.dims[k] + 1)
        out.push_back("Q(" + std::to_string(i + 1) + "," + std::to_string(k + 1) + ") has shape " +
                      std::to_string(m.rows) + "x" + std::to_string(m.cols) + ", expected " +
                      std::to_string(g.dims[i] + 1) + "x" + std::to_string(g.dims[k] + 1));
    }
  }
  return out;
}

bool is_valid_simplex(const SimplexVector& x, double tol) {
  double s = 0.0;
  for (double v : x) {
    if (v < 0.0) return false;
    s += v;
  }
  return std::abs(s - 1.0) <= tol;
}

double utility(const PolymatrixGame& g, int i, const JointAction& x) {
  check_joint_action(g, x, "utility");
  double f = 0.0;
  for (int k = 0; k < g.N; ++k) {
    if (k == i) continue;
    const Mat& q = g.q(i, k);
    for (int a = 0; a < q.rows; ++a) {
      double row = 0.0;
      for (int b = 0; b < q.cols; ++b) row += q.at(a, b) * x[k][b];
      f += x[i][a] * row;
    }
  }
  for (int j = 0; j < g.N; ++j)
    for (size_t a = 0; a < g.r[j].size(); ++a) f += g.r[j][a] * x[j][a];
  return f;
}

BestResponseResult best_response(const PolymatrixGame& g, int i, const JointAction& x) {
  check_joint_action(g, x, "best_response");
  BestResponseResult res;
  res.coefficients = g.r[i];
  for (int k = 0; k < g.N; ++k) {
    if (k == i) continue;
    const Mat& q = g.q(i, k);
    for (int a = 0; a < q.rows; ++a) {
      double row = 0.0;
      for (int b = 0; b < q.cols; ++b) row += q.at(a, b) * x[k][b];
      res.coefficients[a] += row;
    }
  }
  res.best_value = *std::max_element(res.coefficients.begin(), res.coefficients.end());
  res.current_value = 0.0;
  for (size_t a = 0; a < res.coefficients.size(); ++a)
    res.current_value += res.coefficients[a] * x[i][a];
  res.gap = res.best_value - res.current_value;
  return res;
}

double epsilon_gap(const PolymatrixGame& g, const JointAction& x) {
  double gap = 0.0;
  for (int i = 0; i < g.N; ++i) gap = std::max(gap, best_response(g, i, x).gap);
  return gap;
}

DeltaF delta_f(const PolymatrixGame& g, long long enumeration_cap) {
  DeltaF out;
  long long count = 1;
  for (int i = 0; i < g.N; ++i) {
    count *= g.dims[i] + 1;
    if (count > enumeration_cap) break;
  }
  if (count > enumeration_cap) {
    // Interval upper bound: each coupling contributes at most its entry
    // spread, each linear term its own range.
    double worst = 0.0;
    for (int i = 0; i < g.N; ++i) {
      double b = 0.0;
      for (int k = 0; k < g.N; ++k) {
        if (k == i) continue;
        const Mat& q = g.q(i, k);
        double mx = q.data.empty() ? 0.0 : *std::max_element(q.data.begin(), q.data.end());
        double mn = q.data.empty() ? 0.0 : *std::min_element(q.data.begin(), q.data.end());
        b += mx - mn;
      }
      for (int j = 0; j < g.N; ++j) {
        double mx = *std::max_element(g.r[j].begin(), g.r[j].end());
        double mn = *std::min_element(g.r[j].begin(), g.r[j].end());
        b += mx - mn;
      }
      worst = std::max(worst, b);
    }
    out.value = worst;
    out.exact = false;
    return out;
  }

  std::vector<int> idx(g.N, 0);
  std::vector<double> fmax(g.N, -1.0 / 0.0), fmin(g.N, 1.0 / 0.0);
  while (true) {
    for (int i = 0; i < g.N; ++i) {
      double f = 0.0;
      for (int k = 0; k < g.N; ++k) {
        if (k == i) continue;
        f += g.q(i, k).at(idx[i], idx[k]);
      }
      for (int j = 0; j < g.N; ++j) f += g.r[j][idx[j]];
      fmax[i] = std::max(fmax[i], f);
      fmin[i] = std::min(fmin[i], f);
    }
    int p = 0;
    while (p < g.N) {
      if (++idx[p] <= g.dims[p]) break;
      idx[p] = 0;
      ++p;
    }
    if (p == g.N) break;
  }
  for (int i = 0; i < g.N; ++i) out.value = std::max(out.value, fmax[i] - fmin[i]);
  return out;
}

}  // namespace polyqre
