#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "polyqre/algorithms.hpp"
#include "polyqre/game.hpp"

namespace polyqre {

// Resolved experiment description. Populated from a key = value config file
// and/or CLI flags; exactly one game source must be set.
struct ExperimentConfig {
  // game source
  std::string builtin;                 // "table1" or "zero:N:dims"
  std::string game_file;
  bool use_random = false;
  int random_players = 2;
  std::vector<int> random_dims = {1, 1};
  double random_range = 1.0;
  std::uint64_t random_seed = 0;

  double epsilon = 0.05;
  double tau = -1.0;                   // <= 0 means "auto"
  bool strict_tau = false;
  double utility_scale = 1.0;

  std::string algorithm = "pgd";       // "pgd" | "fixed_point"
  PGDConfig pgd;
  FixedPointConfig fp;
  std::uint64_t seed = 0;              // initial-estimate randomization

  std::string graph_topology = "complete";
  double beta = 0.5;
  std::vector<std::tuple<int, int, double>> custom_edges;  // 0-based, explicit weights

  std::string outdir;                  // empty -> $POLYQRE_OUTDIR or "."
  int thin = 1;
};

ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                        const std::string& where);

PolymatrixGame load_game_file(const std::string& path);
void save_game_file(const PolymatrixGame& g, const std::string& path);

// Q entries i.i.d. uniform in [-range, range], r likewise; deterministic in seed.
PolymatrixGame gen_random_game(int N, const std::vector<int>& dims, double range,
                               std::uint64_t seed);

// Builds the configured game (builtin / file / random), scaled by utility_scale.
PolymatrixGame build_game(const ExperimentConfig& cfg);

// 17-significant-digit float serialization used by all output files.
std::string format_double(double v);

// Runs the configured experiment; writes trace.csv, summary.txt and
// config_echo.txt into the output directory. Returns the process exit code:
// 0 converged, 2 iteration cap, 1 error (errors are reported via exceptions
// by this function; the CLI maps them to exit code 1).
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Prints the gap, per-player best-response coefficients and the stationarity
// classification at the given reduced point; returns 0.
int verify_point(const PolymatrixGame& g, const ReducedPoint& point, double epsilon, double tau,
                 std::ostream& out);

}  // namespace polyqre
