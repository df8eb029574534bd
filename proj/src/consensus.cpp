#include "polyqre/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace polyqre {

namespace {

void check_connected(int N, const std::vector<std::pair<int, int>>& edges) {
  if (N <= 1) return;
  std::vector<std::vector<int>> adj(N);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(N, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
  }
  if (reached != N) throw std::invalid_argument("communication graph is disconnected");
}

}  // namespace

CommGraph build_graph(int N, const std::string& topology, double beta) {
  if (N < 1) throw std::invalid_argument("build_graph: need at least one node");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("build_graph: beta must be in (0,1)");
  CommGraph g;
  g.N = N;
  g.beta = beta;
  g.W = Mat(N, N, 0.0);
  if (N == 1) return g;  // single node: empty edge set

  if (topology == "complete") {
    const double w = (1.0 - beta) / (N - 1);
    for (int i = 0; i < N; ++i)
      for (int k = i + 1; k < N; ++k) {
        g.W.at(i, k) = g.W.at(k, i) = w;
        g.edges.emplace_back(i, k);
      }
  } else if (topology == "ring") {
    if (N == 2) {
      g.W.at(0, 1) = g.W.at(1, 0) = 1.0 - beta;
      g.edges.emplace_back(0, 1);
    } else {
      const double w = (1.0 - beta) / 2.0;
      for (int i = 0; i < N; ++i) {
        int k = (i + 1) % N;
        g.W.at(i, k) += w;
        g.W.at(k, i) += w;
        g.edges.emplace_back(i, k);
      }
    }
  } else {
    throw std::invalid_argument("build_graph: unknown topology '" + topology +
                                "' (expected complete, ring, or custom edges)");
  }
  return g;
}

CommGraph build_graph_custom(int N, const std::vector<std::tuple<int, int, double>>& edges,
                             double beta) {
  if (N < 1) throw std::invalid_argument("build_graph: need at least one node");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("build_graph: beta must be in (0,1)");
  CommGraph g;
  g.N = N;
  g.beta = beta;
  g.W = Mat(N, N, 0.0);
  for (auto [a, b, w] : edges) {
    if (a < 0 || a >= N || b < 0 || b >= N || a == b)
      throw std::invalid_argument("build_graph: edge endpoints out of range");
    if (!(w > 0.0)) throw std::invalid_argument("build_graph: edge weights must be positive");
    g.W.at(a, b) += w;
    g.W.at(b, a) += w;
    g.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  check_connected(N, g.edges);
  for (int i = 0; i < N; ++i) {
    double mass = 0.0;
    for (int k = 0; k < N; ++k) mass += g.W.at(i, k);
    if (std::abs(mass - (1.0 - beta)) > 1e-12)
      throw std::invalid_argument("build_graph: node " + std::to_string(i + 1) +
                                  " off-diagonal mass " + std::to_string(mass) +
                                  " != 1 - beta = " + std::to_string(1.0 - beta));
  }
  return g;
}

ExtendedMixing extend(const CommGraph& g, const std::vector<int>& dims) {
  if (static_cast<int>(dims.size()) != g.N)
    throw std::invalid_argument("extend: dims length must match the node count");
  ExtendedMixing M;
  M.offsets.assign(g.N + 1, 0);
  for (int i = 0; i < g.N; ++i) M.offsets[i + 1] = M.offsets[i] + dims[i];
  M.n = M.offsets[g.N];
  M.W = Mat(M.n, M.n, 0.0);

  // Adjacent players communicate through their first estimates; estimates of
  // one player share beta / n_i (self included).
  for (int i = 0; i < g.N; ++i) {
    for (int k = 0; k < g.N; ++k)
      if (k != i && g.W.at(i, k) != 0.0) M.W.at(M.offsets[i], M.offsets[k]) = g.W.at(i, k);
    const double intra = g.beta / dims[i];
    for (int j = 0; j < dims[i]; ++j)
      for (int jp = 0; jp < dims[i]; ++jp) M.W.at(M.offsets[i] + j, M.offsets[i] + jp) = intra;
  }

  // As written, rows other than the first of each player sum to beta only;
  // restore stochasticity by topping up the diagonal.
  M.max_correction = 0.0;
  for (int a = 0; a < M.n; ++a) {
    double rowsum = 0.0;
    for (int b = 0; b < M.n; ++b) rowsum += M.W.at(a, b);
    const double corr = 1.0 - rowsum;
    if (corr < -1e-12)
      throw std::invalid_argument("extend: row " + std::to_string(a + 1) +
                                  " exceeds stochasticity (sum " + std::to_string(rowsum) + ")");
    M.W.at(a, a) += corr;
    M.max_correction = std::max(M.max_correction, corr);
  }
  return M;
}

EstimateCloud make_cloud(const std::vector<int>& dims, const ReducedPoint& value) {
  EstimateCloud c;
  c.dims = dims;
  int n = 0;
  for (int d : dims) n += d;
  c.est.assign(n, value);
  return c;
}

EstimateCloud mix(const ExtendedMixing& M, const EstimateCloud& cloud) {
  if (cloud.size() != M.n) throw std::invalid_argument("mix: cloud size must match the matrix");
  EstimateCloud out;
  out.dims = cloud.dims;
  out.est.resize(cloud.est.size());
  for (int a = 0; a < M.n; ++a) {
    ReducedPoint p = cloud.est[0];
    for (auto& xi : p.x) std::fill(xi.begin(), xi.end(), 0.0);
    for (int b = 0; b < M.n; ++b) {
      const double w = M.W.at(a, b);
      if (w == 0.0) continue;
      for (size_t i = 0; i < p.x.size(); ++i)
        for (size_t l = 0; l < p.x[i].size(); ++l) p.x[i][l] += w * cloud.est[b].x[i][l];
    }
    out.est[a] = std::move(p);
  }
  return out;
}

double disagreement(const EstimateCloud& cloud) {
  double d = 0.0;
  for (size_t a = 0; a < cloud.est.size(); ++a)
    for (size_t b = a + 1; b < cloud.est.size(); ++b)
      for (size_t i = 0; i < cloud.est[a].x.size(); ++i)
        for (size_t l = 0; l < cloud.est[a].x[i].size(); ++l)
          d = std::max(d, std::abs(cloud.est[a].x[i][l] - cloud.est[b].x[i][l]));
  return d;
}

ReducedPoint cloud_mean(const EstimateCloud& cloud) {
  ReducedPoint m = cloud.est[0];
  for (auto& xi : m.x) std::fill(xi.begin(), xi.end(), 0.0);
  for (const auto& e : cloud.est)
    for (size_t i = 0; i < m.x.size(); ++i)
      for (size_t l = 0; l < m.x[i].size(); ++l) m.x[i][l] += e.x[i][l];
  const double inv = 1.0 / cloud.est.size();
  for (auto& xi : m.x)
    for (auto& v : xi) v *= inv;
  return m;
}

std::vector<double> sym_eigenvalues(const Mat& S) {
  const int n = S.rows;
  Mat A = S;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A.at(p, q) * A.at(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (A.at(q, q) - A.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A.at(k, p), akq = A.at(k, q);
          A.at(k, p) = c * akp - s * akq;
          A.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A.at(p, k), aqk = A.at(q, k);
          A.at(p, k) = c * apk - s * aqk;
          A.at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = A.at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double lambda2(const ExtendedMixing& M) {
  if (M.n == 1) return 0.0;
  std::vector<double> ev = sym_eigenvalues(M.W);
  std::vector<double> mods(ev.size());
  for (size_t i = 0; i < ev.size(); ++i) mods[i] = std::abs(ev[i]);
  std::sort(mods.begin(), mods.end());
  return mods[mods.size() - 2];
}

}  // namespace polyqre
