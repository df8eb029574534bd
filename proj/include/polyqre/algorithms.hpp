#pragma once

#include <string>
#include <vector>

#include "polyqre/consensus.hpp"
#include "polyqre/reduced.hpp"
#include "polyqre/rng.hpp"

namespace polyqre {

enum class Schedule { harmonic, constant, power };

Schedule schedule_from_string(const std::string& s);
std::string schedule_to_string(Schedule s);

// Distributed projected gradient descent configuration.
struct PGDConfig {
  double gamma0 = 5.0;
  Schedule schedule = Schedule::harmonic;
  double power_a = 0.75;          // gamma0 * t^{-a}; square-summable needs a in (0.5, 1]
  long max_iters = 10000;
  double restart_threshold = 1e-3;  // gradient-norm trigger after a full horizon
  int max_restarts = 5;
  double stop_residual = 1e-12;     // <= 0 disables the residual stop
  std::uint64_t seed = 0;
  int thin = 1;                     // keep every thin-th trace row
  bool keep_estimates = false;      // also record per-estimate points in kept rows
};

// Damped fixed-point (softmax response) configuration. eta = 1 is the
// undamped update; see the stability note in run_fixed_point.
struct FixedPointConfig {
  double eta = 0.1;
  long max_iters = 10000;
  double stop_distance = 1e-10;  // successive-iterate infinity distance
  std::uint64_t seed = 0;
  int thin = 1;
  bool keep_estimates = false;
};

enum class RunStatus { converged, max_iters };

struct TraceRow {
  long iter = 0;
  double total_residual = 0.0;
  double epsilon_gap = 0.0;
  double disagreement = 0.0;
  std::vector<double> mean;                 // flattened cloud mean
  std::vector<std::vector<double>> estimates;  // filled only when keep_estimates
};

struct RunTrace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::max_iters;
  int restarts = 0;
  double wall_seconds = 0.0;
  double final_residual = 0.0;
  double final_gap = 0.0;
  double final_disagreement = 0.0;
  double final_successive_distance = 0.0;
  double lipschitz_factor = 0.0;  // tau / min final coordinate (fixed point only)
  EstimateCloud final_cloud;
  ReducedPoint final_mean;

  std::string status_string() const;  // "converged", "restarted k times", "max_iters"
};

// Dirichlet(1) per player block, rescaled into the box.
ReducedPoint random_box_point(const std::vector<int>& dims, const TruncatedBox& box, Rng& rng);
EstimateCloud random_cloud(const std::vector<int>& dims, const TruncatedBox& box, Rng& rng);
EstimateCloud centroid_cloud(const std::vector<int>& dims, const TruncatedBox& box);

// Algorithm: each round mixes the cloud, then every estimate (i, j) takes a
// projected gradient step on its own objective l_ij. If gradients remain
// above restart_threshold after a full horizon, estimates are re-randomized
// (up to max_restarts). Gap/residual rows refer to the lifted cloud mean.
RunTrace run_pgd(const ReducedGame& rg, const TruncatedBox& box, const ExtendedMixing& M,
                 const PGDConfig& cfg, const EstimateCloud& init);

// Algorithm: each round mixes the cloud, then player i rewrites its own
// coordinates in every estimate with the eta-damped softmax response at
// temperature tau (log-domain, max-subtracted against the implicit zero
// logit of the eliminated coordinate), projected back into the box.
RunTrace run_fixed_point(const ReducedGame& rg, const TruncatedBox& box, const ExtendedMixing& M,
                         const FixedPointConfig& cfg, const EstimateCloud& init);

// Per-coordinate stationarity diagnostics at a point.
struct StationarityRecord {
  int player = 0;
  int coord = 0;
  double residual = 0.0;   // l_ij
  double grad_norm = 0.0;  // ||grad l_ij||
  bool at_lower = false;   // coordinate at the box lower bound
  bool at_cap = false;     // player's coordinate sum at the box cap
};

struct StationarityReport {
  std::vector<StationarityRecord> records;
  // "certified" (all residuals <= tol), "boundary-suspect" (some residual
  // above tol with a boundary contact), or "non-stationary".
  std::string classification;
};

StationarityReport stationarity_report(const ReducedGame& rg, const TruncatedBox& box,
                                       const ReducedPoint& x, double tau, double tol);

}  // namespace polyqre
