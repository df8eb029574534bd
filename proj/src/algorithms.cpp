#include "polyqre/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "polyqre/projection.hpp"

namespace polyqre {

Schedule schedule_from_string(const std::string& s) {
  if (s == "harmonic") return Schedule::harmonic;
  if (s == "constant") return Schedule::constant;
  if (s == "power") return Schedule::power;
  throw std::invalid_argument("unknown schedule '" + s + "' (harmonic|constant|power)");
}

std::string schedule_to_string(Schedule s) {
  switch (s) {
    case Schedule::harmonic: return "harmonic";
    case Schedule::constant: return "constant";
    default: return "power";
  }
}

std::string RunTrace::status_string() const {
  if (status == RunStatus::max_iters) return "max_iters";
  if (restarts > 0) return "restarted " + std::to_string(restarts) + " times";
  return "converged";
}

ReducedPoint random_box_point(const std::vector<int>& dims, const TruncatedBox& box, Rng& rng) {
  ReducedPoint p;
  p.x.resize(dims.size());
  for (size_t i = 0; i < dims.size(); ++i) {
    const int ni = dims[i];
    const std::vector<double> y = rng.dirichlet(ni + 1);
    const double span = box.upper() - ni * box.lower;
    p.x[i].resize(ni);
    for (int l = 0; l < ni; ++l) p.x[i][l] = box.lower + span * y[l];
  }
  return p;
}

EstimateCloud random_cloud(const std::vector<int>& dims, const TruncatedBox& box, Rng& rng) {
  EstimateCloud c;
  c.dims = dims;
  int n = 0;
  for (int d : dims) n += d;
  c.est.reserve(n);
  for (int a = 0; a < n; ++a) c.est.push_back(random_box_point(dims, box, rng));
  return c;
}

EstimateCloud centroid_cloud(const std::vector<int>& dims, const TruncatedBox& box) {
  ReducedPoint p;
  p.x.resize(dims.size());
  for (size_t i = 0; i < dims.size(); ++i) p.x[i].assign(dims[i], 1.0 / (dims[i] + 1.0));
  for (size_t i = 0; i < dims.size(); ++i) {
    double s = 0.0;
    for (double v : p.x[i]) s += v;
    if (p.x[i][0] < box.lower || s > box.upper())
      throw std::invalid_argument("centroid_cloud: centroid outside the box");
  }
  return make_cloud(dims, p);
}

namespace {

void check_init(const EstimateCloud& init, const std::vector<int>& dims,
                const TruncatedBox& box, int n) {
  if (init.size() != n) throw std::invalid_argument("init cloud has wrong estimate count");
  for (const auto& e : init.est) {
    for (size_t i = 0; i < e.x.size(); ++i) {
      double s = 0.0;
      for (double v : e.x[i]) {
        if (v < box.lower - 1e-12) throw std::invalid_argument("init estimate below box lower bound");
        s += v;
      }
      if (s > box.upper() + 1e-12) throw std::invalid_argument("init estimate above box sum cap");
    }
  }
  (void)dims;
}

struct TraceState {
  RunTrace trace;
  int thin = 1;
  bool keep_estimates = false;

  void log(long iter, const ReducedGame& rg, const EstimateCloud& cloud, double tau, bool force) {
    if (!force && thin > 1 && iter % thin != 0) return;
    TraceRow row;
    row.iter = iter;
    const ReducedPoint mean = cloud_mean(cloud);
    row.total_residual = total_residual(rg, mean, tau);
    row.epsilon_gap = epsilon_gap(rg.source, lift(mean));
    row.disagreement = disagreement(cloud);
    row.mean = flatten(mean);
    if (keep_estimates)
      for (const auto& e : cloud.est) row.estimates.push_back(flatten(e));
    trace.rows.push_back(std::move(row));
  }
};

void finalize(RunTrace& trace, const ReducedGame& rg, const EstimateCloud& cloud, double tau,
              std::chrono::steady_clock::time_point t0) {
  const ReducedPoint mean = cloud_mean(cloud);
  trace.final_cloud = cloud;
  trace.final_mean = mean;
  trace.final_residual = total_residual(rg, mean, tau);
  trace.final_gap = epsilon_gap(rg.source, lift(mean));
  trace.final_disagreement = disagreement(cloud);
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double grad_norm(const std::vector<double>& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

}  // namespace

RunTrace run_pgd(const ReducedGame& rg, const TruncatedBox& box, const ExtendedMixing& M,
                 const PGDConfig& cfg, const EstimateCloud& init) {
  const auto t0 = std::chrono::steady_clock::now();
  const double tau = box.tau;
  const auto off = rg.offsets();
  const int n = rg.total_dim();
  check_init(init, rg.dims, box, n);

  Rng rng(cfg.seed);
  TraceState ts;
  ts.thin = cfg.thin;
  ts.keep_estimates = cfg.keep_estimates;

  EstimateCloud cloud = init;
  long global_iter = 0;
  ts.log(global_iter, rg, cloud, tau, true);

  for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
    bool residual_stop = false;
    for (long t = 1; t <= cfg.max_iters; ++t) {
      cloud = mix(M, cloud);
      double gamma = cfg.gamma0;
      if (cfg.schedule == Schedule::harmonic)
        gamma = cfg.gamma0 / static_cast<double>(t);
      else if (cfg.schedule == Schedule::power)
        gamma = cfg.gamma0 * std::pow(static_cast<double>(t), -cfg.power_a);

      EstimateCloud next = cloud;
      int e = 0;
      for (int i = 0; i < rg.N; ++i) {
        for (int j = 0; j < rg.dims[i]; ++j, ++e) {
          const std::vector<double> grad = grad_residual(rg, cloud.est[e], i, j, tau);
          for (double v : grad)
            if (!std::isfinite(v))
              throw std::runtime_error("run_pgd: non-finite gradient at iteration " +
                                       std::to_string(global_iter + 1));
          std::vector<double> y = flatten(cloud.est[e]);
          for (int c = 0; c < n; ++c) y[c] -= gamma * grad[c];
          ReducedPoint p;
          p.x.resize(rg.N);
          for (int k = 0; k < rg.N; ++k) {
            std::vector<double> block(y.begin() + off[k], y.begin() + off[k] + rg.dims[k]);
            p.x[k] = project(block, box.lower, box.upper()).point;
          }
          next.est[e] = std::move(p);
        }
      }
      cloud = std::move(next);
      ++global_iter;
      ts.log(global_iter, rg, cloud, tau, t == cfg.max_iters);

      if (cfg.stop_residual > 0.0 &&
          total_residual(rg, cloud_mean(cloud), tau) <= cfg.stop_residual) {
        residual_stop = true;
        break;
      }
    }

    if (residual_stop) {
      ts.trace.status = RunStatus::converged;
      break;
    }
    // Horizon exhausted: restart when some estimate's own gradient is still large.
    double worst = 0.0;
    int e = 0;
    for (int i = 0; i < rg.N; ++i)
      for (int j = 0; j < rg.dims[i]; ++j, ++e)
        worst = std::max(worst, grad_norm(grad_residual(rg, cloud.est[e], i, j, tau)));
    if (worst <= cfg.restart_threshold) {
      ts.trace.status = RunStatus::converged;
      break;
    }
    if (attempt == cfg.max_restarts) {
      ts.trace.status = RunStatus::max_iters;
      break;
    }
    cloud = random_cloud(rg.dims, box, rng);
    ++ts.trace.restarts;
    ++global_iter;
    ts.log(global_iter, rg, cloud, tau, true);
  }

  finalize(ts.trace, rg, cloud, tau, t0);
  return ts.trace;
}

RunTrace run_fixed_point(const ReducedGame& rg, const TruncatedBox& box, const ExtendedMixing& M,
                         const FixedPointConfig& cfg, const EstimateCloud& init) {
  if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
    throw std::invalid_argument("run_fixed_point: eta must be in (0, 1]");
  const auto t0 = std::chrono::steady_clock::now();
  const double tau = box.tau;
  const int n = rg.total_dim();
  check_init(init, rg.dims, box, n);

  TraceState ts;
  ts.thin = cfg.thin;
  ts.keep_estimates = cfg.keep_estimates;

  EstimateCloud cloud = init;
  long iter = 0;
  ts.log(iter, rg, cloud, tau, true);
  double succ = 1.0 / 0.0;

  for (long t = 1; t <= cfg.max_iters; ++t) {
    const EstimateCloud prev = cloud;
    cloud = mix(M, cloud);

    int e = 0;
    for (int i = 0; i < rg.N; ++i) {
      const int ni = rg.dims[i];
      for (int j = 0; j < ni; ++j, ++e) {
        ReducedPoint& p = cloud.est[e];
        // Damped softmax response in player i's own coordinates, computed
        // in log domain against the implicit zero logit of the eliminated
        // coordinate.
        std::vector<double> logits(ni);
        double m = 0.0;  // max(0, logits)
        for (int l = 0; l < ni; ++l) {
          logits[l] = reduced_gradient_difference(rg, p, i, l) / tau;
          if (!std::isfinite(logits[l]))
            throw std::runtime_error("run_fixed_point: non-finite logit at iteration " +
                                     std::to_string(t));
          m = std::max(m, logits[l]);
        }
        double denom = std::exp(-m);
        for (int l = 0; l < ni; ++l) denom += std::exp(logits[l] - m);
        std::vector<double> block(ni);
        for (int l = 0; l < ni; ++l)
          block[l] = (1.0 - cfg.eta) * p.x[i][l] + cfg.eta * std::exp(logits[l] - m) / denom;
        p.x[i] = project(block, box.lower, box.upper()).point;
      }
    }

    ++iter;
    ts.log(iter, rg, cloud, tau, t == cfg.max_iters);
    succ = 0.0;
    for (size_t a = 0; a < cloud.est.size(); ++a)
      for (size_t i = 0; i < cloud.est[a].x.size(); ++i)
        for (size_t l = 0; l < cloud.est[a].x[i].size(); ++l)
          succ = std::max(succ, std::abs(cloud.est[a].x[i][l] - prev.est[a].x[i][l]));
    if (succ <= cfg.stop_distance) {
      ts.trace.status = RunStatus::converged;
      break;
    }
  }
  ts.trace.final_successive_distance = succ;

  double min_coord = 1.0;
  for (const auto& e : cloud.est) {
    for (size_t i = 0; i < e.x.size(); ++i) {
      double s = 0.0;
      for (double v : e.x[i]) {
        min_coord = std::min(min_coord, v);
        s += v;
      }
      min_coord = std::min(min_coord, 1.0 - s);
    }
  }
  ts.trace.lipschitz_factor = tau / std::max(min_coord, 1e-300);

  finalize(ts.trace, rg, cloud, tau, t0);
  return ts.trace;
}

StationarityReport stationarity_report(const ReducedGame& rg, const TruncatedBox& box,
                                       const ReducedPoint& x, double tau, double tol) {
  StationarityReport rep;
  bool all_small = true;
  bool boundary = false;
  for (int i = 0; i < rg.N; ++i) {
    double s = 0.0;
    for (double v : x.x[i]) s += v;
    const bool cap = s >= box.upper() - 1e-9;
    for (int j = 0; j < rg.dims[i]; ++j) {
      StationarityRecord rec;
      rec.player = i;
      rec.coord = j;
      rec.residual = residual_l(rg, x, i, j, tau);
      std::vector<double> g = grad_residual(rg, x, i, j, tau);
      double n2 = 0.0;
      for (double v : g) n2 += v * v;
      rec.grad_norm = std::sqrt(n2);
      rec.at_lower = x.x[i][j] <= box.lower + 1e-9;
      rec.at_cap = cap;
      if (rec.residual > tol) all_small = false;
      if (rec.at_lower || rec.at_cap) boundary = true;
      rep.records.push_back(rec);
    }
  }
  rep.classification = all_small ? "certified" : (boundary ? "boundary-suspect" : "non-stationary");
  return rep;
}

}  // namespace polyqre
