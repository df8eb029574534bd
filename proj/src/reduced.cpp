#include "polyqre/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polyqre {

int ReducedGame::total_dim() const { return std::accumulate(dims.begin(), dims.end(), 0); }

std::vector<int> ReducedGame::offsets() const {
  std::vector<int> off(dims.size() + 1, 0);
  for (size_t i = 0; i < dims.size(); ++i) off[i + 1] = off[i] + dims[i];
  return off;
}

ReducedGame transform(const PolymatrixGame& g) {
  auto violations = validate_game(g);
  if (!violations.empty())
    throw std::invalid_argument("transform: invalid game: " + violations.front());

  ReducedGame rg;
  rg.N = g.N;
  rg.dims = g.dims;
  rg.Qhat.resize(static_cast<size_t>(g.N) * g.N);
  rg.rhat.resize(g.N);
  rg.chat.resize(static_cast<size_t>(g.N) * g.N);
  rg.shift.assign(g.N, 0.0);
  rg.source = g;

  for (int i = 0; i < g.N; ++i) {
    const int ni = g.dims[i];  // eliminated coordinate index
    rg.rhat[i].assign(ni, 0.0);
    for (int j = 0; j < ni; ++j) rg.rhat[i][j] = g.r[i][j] - g.r[i][ni];

    double shift = 0.0;
    for (int j = 0; j < g.N; ++j) shift += g.r[j][g.dims[j]];

    for (int k = 0; k < g.N; ++k) {
      if (k == i) continue;
      const int nk = g.dims[k];
      const Mat& q = g.q(i, k);

      Mat qh(ni, nk);
      for (int j = 0; j < ni; ++j)
        for (int l = 0; l < nk; ++l)
          qh.at(j, l) = q.at(j, l) - q.at(j, nk) - q.at(ni, l) + q.at(ni, nk);
      rg.Qhat[static_cast<size_t>(i) * g.N + k] = std::move(qh);

      for (int j = 0; j < ni; ++j) rg.rhat[i][j] += q.at(j, nk) - q.at(ni, nk);

      std::vector<double> c(nk, 0.0);
      for (int l = 0; l < nk; ++l) c[l] = (q.at(ni, l) - q.at(ni, nk)) + (g.r[k][l] - g.r[k][nk]);
      rg.chat[static_cast<size_t>(i) * g.N + k] = std::move(c);

      shift += q.at(ni, nk);
    }
    rg.shift[i] = shift;
  }
  return rg;
}

JointAction lift(const ReducedPoint& p) {
  JointAction x(p.x.size());
  for (size_t i = 0; i < p.x.size(); ++i) {
    double s = 0.0;
    for (double v : p.x[i]) s += v;
    if (s > 1.0 + 1e-12)
      throw std::invalid_argument("lift: player " + std::to_string(i + 1) +
                                  " coordinates sum to " + std::to_string(s) + " > 1");
    x[i] = p.x[i];
    x[i].push_back(1.0 - s);
  }
  return x;
}

ReducedPoint reduce_point(const JointAction& x) {
  ReducedPoint p;
  p.x.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) p.x[i].assign(x[i].begin(), x[i].end() - 1);
  return p;
}

ReducedPoint make_reduced_point(const std::vector<int>& dims, double fill) {
  ReducedPoint p;
  p.x.resize(dims.size());
  for (size_t i = 0; i < dims.size(); ++i) p.x[i].assign(dims[i], fill);
  return p;
}

std::vector<double> flatten(const ReducedPoint& p) {
  std::vector<double> v;
  for (const auto& xi : p.x) v.insert(v.end(), xi.begin(), xi.end());
  return v;
}

ReducedPoint unflatten(const std::vector<int>& dims, const std::vector<double>& v) {
  ReducedPoint p;
  p.x.resize(dims.size());
  size_t pos = 0;
  for (size_t i = 0; i < dims.size(); ++i) {
    p.x[i].assign(v.begin() + pos, v.begin() + pos + dims[i]);
    pos += dims[i];
  }
  return p;
}

double reduced_utility(const ReducedGame& rg, int i, const ReducedPoint& p) {
  double f = rg.shift[i];
  for (int j = 0; j < rg.dims[i]; ++j) f += rg.rhat[i][j] * p.x[i][j];
  for (int k = 0; k < rg.N; ++k) {
    if (k == i) continue;
    const Mat& qh = rg.qhat(i, k);
    for (int j = 0; j < qh.rows; ++j) {
      double row = 0.0;
      for (int l = 0; l < qh.cols; ++l) row += qh.at(j, l) * p.x[k][l];
      f += p.x[i][j] * row;
    }
    const auto& c = rg.c(i, k);
    for (int l = 0; l < rg.dims[k]; ++l) f += c[l] * p.x[k][l];
  }
  return f;
}

double reduced_gradient_difference(const ReducedGame& rg, const ReducedPoint& p, int i, int j) {
  double gm = rg.rhat[i][j];
  for (int k = 0; k < rg.N; ++k) {
    if (k == i) continue;
    const Mat& qh = rg.qhat(i, k);
    for (int l = 0; l < qh.cols; ++l) gm += qh.at(j, l) * p.x[k][l];
  }
  return gm;
}

namespace {

double remainder_of(const ReducedPoint& p, int i) {
  double s = 0.0;
  for (double v : p.x[i]) s += v;
  return 1.0 - s;
}

void check_log_domain(const ReducedPoint& p, int i, int j, double rem) {
  if (!(p.x[i][j] > 0.0) || !(rem > 0.0))
    throw std::domain_error("residual: log domain violated at player " + std::to_string(i + 1) +
                            ", coordinate " + std::to_string(j + 1));
}

}  // namespace

double residual_root(const ReducedGame& rg, const ReducedPoint& p, int i, int j, double tau) {
  const double rem = remainder_of(p, i);
  check_log_domain(p, i, j, rem);
  return reduced_gradient_difference(rg, p, i, j) - tau * std::log(p.x[i][j]) +
         tau * std::log(rem);
}

double residual_l(const ReducedGame& rg, const ReducedPoint& p, int i, int j, double tau) {
  const double root = residual_root(rg, p, i, j, tau);
  return root * root;
}

std::vector<double> grad_residual(const ReducedGame& rg, const ReducedPoint& p, int i, int j,
                                  double tau) {
  const double rem = remainder_of(p, i);
  check_log_domain(p, i, j, rem);
  const double root = residual_root(rg, p, i, j, tau);
  const auto off = rg.offsets();
  std::vector<double> grad(rg.total_dim(), 0.0);
  for (int l = 0; l < rg.dims[i]; ++l) grad[off[i] + l] = -tau / rem;
  grad[off[i] + j] += -tau / p.x[i][j];
  for (int k = 0; k < rg.N; ++k) {
    if (k == i) continue;
    const Mat& qh = rg.qhat(i, k);
    for (int l = 0; l < qh.cols; ++l) grad[off[k] + l] = qh.at(j, l);
  }
  for (auto& v : grad) v *= 2.0 * root;
  return grad;
}

double total_residual(const ReducedGame& rg, const ReducedPoint& p, double tau) {
  double s = 0.0;
  int n = 0;
  for (int i = 0; i < rg.N; ++i) {
    for (int j = 0; j < rg.dims[i]; ++j) s += residual_l(rg, p, i, j, tau);
    n += rg.dims[i];
  }
  return s / n;
}

std::vector<double> pseudo_gradient(const ReducedGame& rg, const ReducedPoint& p, double tau) {
  std::vector<double> f;
  f.reserve(rg.total_dim());
  for (int i = 0; i < rg.N; ++i)
    for (int j = 0; j < rg.dims[i]; ++j) f.push_back(residual_root(rg, p, i, j, tau));
  return f;
}

TruncatedBox truncated_box(const std::vector<int>& dims, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("truncated_box: tau must be positive");
  const int maxn = *std::max_element(dims.begin(), dims.end());
  TruncatedBox box;
  box.tau = tau;
  box.log_lower = -1.0 / (tau * tau) - std::log(maxn + 1.0);
  box.log_slack = -1.0 / std::pow(tau, 1.5) - std::log(maxn + 1.0);
  box.lower = std::max(std::exp(box.log_lower), TruncatedBox::kLowerFloor);
  box.slack = std::max(std::exp(box.log_slack), TruncatedBox::kSlackFloor);
  if (box.lower * maxn + box.slack >= 1.0)
    throw std::invalid_argument("truncated_box: bounds leave no feasible volume");
  return box;
}

TruncatedBox truncated_box(const PolymatrixGame& g, double tau) {
  return truncated_box(g.dims, tau);
}

TruncatedBox truncated_box(const ReducedGame& rg, double tau) {
  return truncated_box(rg.dims, tau);
}

TauParams tau_max_params(const PolymatrixGame& g) {
  TauParams tp;
  const DeltaF df = delta_f(g);
  tp.delta_f = df.value;
  tp.delta_exact = df.exact;

  // Maximize each reduced coefficient row over the other players' closed
  // reduced simplices (vertices 0 and e_l), keeping R independent of tau.
  const ReducedGame rg = transform(g);
  double R = -1.0 / 0.0;
  for (int i = 0; i < rg.N; ++i) {
    for (int j = 0; j < rg.dims[i]; ++j) {
      double row = rg.rhat[i][j];
      for (int k = 0; k < rg.N; ++k) {
        if (k == i) continue;
        const Mat& qh = rg.qhat(i, k);
        double best = 0.0;
        for (int l = 0; l < qh.cols; ++l) best = std::max(best, qh.at(j, l));
        row += best;
      }
      R = std::max(R, row);
    }
  }
  tp.R = R;

  double tmax = 0.25;
  if (tp.delta_f > 0.0) {
    tmax = std::min(tmax, 1.0 / tp.delta_f);
    tmax = std::min(tmax, 1.0 / (tp.delta_f * tp.delta_f));
  }
  if (tp.R != 0.0) tmax = std::min(tmax, 1.0 / (tp.R * tp.R));
  tp.tau_max = tmax;

  double maxlog = 0.0;
  for (int d : g.dims) maxlog = std::max(maxlog, std::log(d + 1.0));
  tp.epsilon_bound = tp.tau_max * maxlog;
  return tp;
}

TauParams resolve_tau(const PolymatrixGame& g, double epsilon, double tau_request, bool strict) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("resolve_tau: epsilon must be positive");
  TauParams tp = tau_max_params(g);
  tp.epsilon = epsilon;
  double maxlog = 0.0;
  for (int d : g.dims) maxlog = std::max(maxlog, std::log(d + 1.0));
  const double lemma_cap = epsilon / maxlog;
  if (tau_request > 0.0) {
    tp.tau = tau_request;
    if (strict && (tp.tau > lemma_cap || tp.tau > tp.tau_max))
      throw std::invalid_argument(
          "resolve_tau: tau = " + std::to_string(tau_request) +
          " violates the admissible range: tau <= min(epsilon / max ln(n_i+1) = " +
          std::to_string(lemma_cap) + ", tau_max = " + std::to_string(tp.tau_max) +
          "), epsilon bound " + std::to_string(tp.epsilon_bound));
  } else {
    tp.tau = std::min(lemma_cap, 0.99 * tp.tau_max);
  }
  return tp;
}

}  // namespace polyqre
