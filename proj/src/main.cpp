#include <array>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "polyqre/io.hpp"
#include "polyqre/reduced.hpp"

namespace {

using polyqre::ExperimentConfig;

// Options shared by `run` and (partly) `verify`; each flag maps onto a config
// key so the CLI and the config file go through one parsing path.
struct FlagSet {
  std::map<std::string, std::string> vals;
  std::vector<std::string> edges;
  std::vector<std::pair<std::string, std::string>> given;  // (option name, key)
  bool random = false;
  bool strict = false;
};

void add_game_flags(CLI::App* cmd, FlagSet& fs) {
  static const std::vector<std::array<const char*, 3>> opts = {
      {"--builtin", "builtin", "built-in game: 'table1' or 'zero:N:d1,d2,...'"},
      {"--game-file", "game_file", "plain-text game file"},
      {"--random-players", "random_players", "player count for the random generator"},
      {"--random-dims", "random_dims", "comma-separated reduced dimensions, one per player"},
      {"--random-range", "random_range", "coefficients drawn uniformly from [-range, range]"},
      {"--random-seed", "random_seed", "random game seed"},
      {"--utility-scale", "utility_scale", "multiply all payoffs by this factor"},
  };
  for (const auto& o : opts) {
    cmd->add_option(o[0], fs.vals[o[1]], o[2]);
    fs.given.emplace_back(o[0], o[1]);
  }
  cmd->add_flag("--random", fs.random, "draw the game from the random generator");
}

void add_run_flags(CLI::App* cmd, FlagSet& fs) {
  static const std::vector<std::array<const char*, 3>> opts = {
      {"--epsilon", "epsilon", "target equilibrium gap"},
      {"--tau", "tau", "temperature; a number or 'auto'"},
      {"--algorithm", "algorithm", "'pgd' or 'fixed_point'"},
      {"--gamma0", "gamma0", "step-size scale for pgd"},
      {"--schedule", "schedule", "step-size schedule: harmonic, constant or power"},
      {"--power-a", "power_a", "exponent for the power schedule"},
      {"--max-iters", "max_iters", "iteration cap per attempt"},
      {"--restart-threshold", "restart_threshold", "gradient norm that triggers a pgd restart"},
      {"--max-restarts", "max_restarts", "pgd restart budget"},
      {"--stop-residual", "stop_residual", "pgd residual stop; <= 0 disables"},
      {"--eta", "eta", "fixed-point damping in (0, 1]"},
      {"--stop-distance", "stop_distance", "fixed-point successive-iterate stop"},
      {"--seed", "seed", "initial-estimate seed"},
      {"--topology", "topology", "communication graph: complete, ring or custom"},
      {"--beta", "beta", "self-weight of the communication graph"},
      {"--outdir", "outdir", "output directory (default $POLYQRE_OUTDIR or '.')"},
      {"--thin", "thin", "keep every thin-th trace row"},
  };
  for (const auto& o : opts) {
    cmd->add_option(o[0], fs.vals[o[1]], o[2]);
    fs.given.emplace_back(o[0], o[1]);
  }
  cmd->add_option("--edge", fs.edges, "custom graph edge 'i,k,weight' (1-based, repeatable)");
  cmd->add_flag("--strict-tau", fs.strict, "refuse a tau above the admissible bound");
}

void apply_flags(CLI::App* cmd, FlagSet& fs, ExperimentConfig& cfg) {
  for (const auto& [name, key] : fs.given)
    if (cmd->count(name))
      polyqre::apply_config_entry(cfg, key, fs.vals[key], "option " + name);
  if (fs.random) polyqre::apply_config_entry(cfg, "random", "true", "option --random");
  if (fs.strict) polyqre::apply_config_entry(cfg, "strict_tau", "true", "option --strict-tau");
  for (const std::string& e : fs.edges)
    polyqre::apply_config_entry(cfg, "edge", e, "option --edge");
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> v;
  size_t b = 0;
  while (b <= s.size()) {
    size_t e = s.find(',', b);
    if (e == std::string::npos) e = s.size();
    const std::string item = s.substr(b, e - b);
    if (!item.empty()) {
      size_t pos = 0;
      v.push_back(std::stod(item, &pos));
      if (pos != item.size())
        throw std::invalid_argument("invalid coordinate '" + item + "' in --point");
    }
    b = e + 1;
  }
  if (v.empty()) throw std::invalid_argument("--point needs comma-separated coordinates");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed quantal-response equilibrium bench for polymatrix games"};
  app.require_subcommand(1);
  int rc = 0;

  // run
  CLI::App* run = app.add_subcommand("run", "run one experiment and write trace/summary files");
  auto run_flags = std::make_shared<FlagSet>();
  auto config_path = std::make_shared<std::string>();
  run->add_option("--config", *config_path, "key = value config file; flags override it");
  add_game_flags(run, *run_flags);
  add_run_flags(run, *run_flags);
  run->callback([&rc, run, run_flags, config_path] {
    ExperimentConfig cfg;
    if (!config_path->empty()) cfg = polyqre::parse_config_file(*config_path);
    apply_flags(run, *run_flags, cfg);
    rc = polyqre::run_experiment(cfg, std::cout);
  });

  // verify
  CLI::App* verify = app.add_subcommand("verify", "check a point against a game");
  auto verify_flags = std::make_shared<FlagSet>();
  auto point_str = std::make_shared<std::string>();
  auto verify_eps = std::make_shared<std::string>();
  auto verify_tau = std::make_shared<std::string>();
  add_game_flags(verify, *verify_flags);
  verify->add_option("--point", *point_str,
                     "reduced coordinates, comma-separated, player-major")
      ->required();
  verify->add_option("--epsilon", *verify_eps, "target equilibrium gap (default 0.05)");
  verify->add_option("--tau", *verify_tau, "temperature for the residual report; default auto");
  verify->callback([&rc, verify, verify_flags, point_str, verify_eps, verify_tau] {
    ExperimentConfig cfg;
    apply_flags(verify, *verify_flags, cfg);
    if (!verify_eps->empty())
      polyqre::apply_config_entry(cfg, "epsilon", *verify_eps, "option --epsilon");
    if (!verify_tau->empty()) polyqre::apply_config_entry(cfg, "tau", *verify_tau, "option --tau");
    const polyqre::PolymatrixGame g = polyqre::build_game(cfg);
    const std::vector<double> flat = parse_point(*point_str);
    int want = 0;
    for (int d : g.dims) want += d;
    if (static_cast<int>(flat.size()) != want)
      throw std::invalid_argument("--point has " + std::to_string(flat.size()) +
                                  " coordinates, the game needs " + std::to_string(want));
    rc = polyqre::verify_point(g, polyqre::unflatten(g.dims, flat), cfg.epsilon, cfg.tau,
                               std::cout);
  });

  // gen
  CLI::App* gen = app.add_subcommand("gen", "generate a random game file");
  auto gen_players = std::make_shared<int>(2);
  auto gen_dims = std::make_shared<std::string>("1,1");
  auto gen_range = std::make_shared<double>(1.0);
  auto gen_seed = std::make_shared<std::uint64_t>(0);
  auto gen_out = std::make_shared<std::string>();
  gen->add_option("--players", *gen_players, "player count")->required();
  gen->add_option("--dims", *gen_dims, "comma-separated reduced dimensions")->required();
  gen->add_option("--range", *gen_range, "coefficients drawn uniformly from [-range, range]");
  gen->add_option("--seed", *gen_seed, "generator seed");
  gen->add_option("--out", *gen_out, "output game file")->required();
  gen->callback([gen_players, gen_dims, gen_range, gen_seed, gen_out] {
    ExperimentConfig tmp;
    polyqre::apply_config_entry(tmp, "random_dims", *gen_dims, "option --dims");
    if (static_cast<int>(tmp.random_dims.size()) != *gen_players)
      throw std::invalid_argument("--dims must list exactly --players entries");
    const polyqre::PolymatrixGame g =
        polyqre::gen_random_game(*gen_players, tmp.random_dims, *gen_range, *gen_seed);
    polyqre::save_game_file(g, *gen_out);
    std::cout << "wrote " << *gen_out << " (N=" << g.N << ", seed " << *gen_seed << ")\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
