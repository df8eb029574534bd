#include "polyqre/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "polyqre/oracles.hpp"
#include "polyqre/rng.hpp"

namespace polyqre {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& v, const std::string& where, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": invalid number '" + v + "' for '" + key + "'");
  }
}

long parse_long(const std::string& v, const std::string& where, const std::string& key) {
  try {
    size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": invalid integer '" + v + "' for '" + key + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& where, const std::string& key) {
  try {
    size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": invalid seed '" + v + "' for '" + key + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& where, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(where + ": invalid boolean '" + v + "' for '" + key + "'");
}

std::vector<int> parse_int_list(const std::string& v, const std::string& where,
                                const std::string& key) {
  std::vector<int> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(parse_long(item, where, key)));
  }
  if (out.empty()) throw std::invalid_argument(where + ": empty list for '" + key + "'");
  return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                        const std::string& where) {
  if (key == "builtin") {
    cfg.builtin = value;
  } else if (key == "game_file") {
    cfg.game_file = value;
  } else if (key == "random") {
    cfg.use_random = parse_bool(value, where, key);
  } else if (key == "random_players") {
    cfg.random_players = static_cast<int>(parse_long(value, where, key));
  } else if (key == "random_dims") {
    cfg.random_dims = parse_int_list(value, where, key);
  } else if (key == "random_range") {
    cfg.random_range = parse_double(value, where, key);
  } else if (key == "random_seed") {
    cfg.random_seed = parse_u64(value, where, key);
  } else if (key == "epsilon") {
    cfg.epsilon = parse_double(value, where, key);
  } else if (key == "tau") {
    cfg.tau = value == "auto" ? -1.0 : parse_double(value, where, key);
  } else if (key == "strict_tau") {
    cfg.strict_tau = parse_bool(value, where, key);
  } else if (key == "utility_scale") {
    cfg.utility_scale = parse_double(value, where, key);
  } else if (key == "algorithm") {
    if (value != "pgd" && value != "fixed_point")
      throw std::invalid_argument(where + ": algorithm must be 'pgd' or 'fixed_point'");
    cfg.algorithm = value;
  } else if (key == "gamma0") {
    cfg.pgd.gamma0 = parse_double(value, where, key);
  } else if (key == "schedule") {
    try {
      cfg.pgd.schedule = schedule_from_string(value);
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
  } else if (key == "power_a") {
    cfg.pgd.power_a = parse_double(value, where, key);
  } else if (key == "max_iters") {
    const long m = parse_long(value, where, key);
    cfg.pgd.max_iters = m;
    cfg.fp.max_iters = m;
  } else if (key == "restart_threshold") {
    cfg.pgd.restart_threshold = parse_double(value, where, key);
  } else if (key == "max_restarts") {
    cfg.pgd.max_restarts = static_cast<int>(parse_long(value, where, key));
  } else if (key == "stop_residual") {
    cfg.pgd.stop_residual = parse_double(value, where, key);
  } else if (key == "eta") {
    cfg.fp.eta = parse_double(value, where, key);
  } else if (key == "stop_distance") {
    cfg.fp.stop_distance = parse_double(value, where, key);
  } else if (key == "seed") {
    cfg.seed = parse_u64(value, where, key);
  } else if (key == "topology") {
    cfg.graph_topology = value;
  } else if (key == "beta") {
    cfg.beta = parse_double(value, where, key);
  } else if (key == "edge") {
    // "i,k,w" with 1-based player indices.
    std::vector<std::string> parts;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    if (parts.size() != 3)
      throw std::invalid_argument(where + ": edge needs 'i,k,weight', got '" + value + "'");
    const int i = static_cast<int>(parse_long(parts[0], where, key));
    const int k = static_cast<int>(parse_long(parts[1], where, key));
    cfg.custom_edges.emplace_back(i - 1, k - 1, parse_double(parts[2], where, key));
  } else if (key == "outdir") {
    cfg.outdir = value;
  } else if (key == "thin") {
    cfg.thin = static_cast<int>(parse_long(value, where, key));
  } else {
    throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section headers are cosmetic
    const std::string where = path + ":" + std::to_string(lineno);
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(where + ": expected 'key = value', got '" + line + "'");
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
  return cfg;
}

namespace {

// Line-tracked token stream for the plain-text game format.
struct TokenStream {
  std::vector<std::pair<std::string, int>> toks;
  size_t pos = 0;
  std::string path;

  std::string where() const {
    const int line = pos < toks.size() ? toks[pos].second : (toks.empty() ? 0 : toks.back().second);
    return path + ":" + std::to_string(line);
  }
  bool done() const { return pos >= toks.size(); }
  std::string next(const char* what) {
    if (done()) throw std::invalid_argument(path + ": unexpected end of file, expected " + what);
    return toks[pos++].first;
  }
  int next_int(const char* what) { return static_cast<int>(parse_long(next(what), where(), what)); }
  double next_double(const char* what) { return parse_double(next(what), where(), what); }
};

TokenStream tokenize_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
  TokenStream ts;
  ts.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) ts.toks.emplace_back(tok, lineno);
  }
  return ts;
}

}  // namespace

PolymatrixGame load_game_file(const std::string& path) {
  TokenStream ts = tokenize_file(path);
  if (ts.next("'N'") != "N") throw std::invalid_argument(ts.where() + ": game file must start with N");
  const int N = ts.next_int("player count");
  if (N <= 0) throw std::invalid_argument(path + ": player count must be positive");
  if (ts.next("'dims'") != "dims")
    throw std::invalid_argument(ts.where() + ": expected dims after N");
  std::vector<int> dims(N);
  for (int i = 0; i < N; ++i) {
    dims[i] = ts.next_int("dimension");
    if (dims[i] <= 0) throw std::invalid_argument(path + ": dimensions must be positive");
  }
  PolymatrixGame g = make_zero_game(N, dims);
  while (!ts.done()) {
    const std::string block = ts.next("block keyword");
    if (block == "Q") {
      const std::string at = ts.where();
      const int i = ts.next_int("player index") - 1;
      const int k = ts.next_int("player index") - 1;
      if (i < 0 || i >= N || k < 0 || k >= N || i == k)
        throw std::invalid_argument(at + ": Q block needs two distinct player indices in 1.." +
                                    std::to_string(N));
      Mat m(dims[i] + 1, dims[k] + 1);
      for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) m.at(r, c) = ts.next_double("Q entry");
      g.set_q(i, k, std::move(m));
    } else if (block == "r") {
      const std::string at = ts.where();
      const int i = ts.next_int("player index") - 1;
      if (i < 0 || i >= N)
        throw std::invalid_argument(at + ": r block needs a player index in 1.." +
                                    std::to_string(N));
      for (int c = 0; c <= dims[i]; ++c) g.r[i][c] = ts.next_double("r entry");
    } else {
      throw std::invalid_argument(ts.where() + ": expected 'Q' or 'r', got '" + block + "'");
    }
  }
  const std::vector<std::string> bad = validate_game(g);
  if (!bad.empty()) throw std::invalid_argument(path + ": " + bad.front());
  return g;
}

void save_game_file(const PolymatrixGame& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write game file '" + path + "'");
  out << "N " << g.N << "\n";
  out << "dims";
  for (int d : g.dims) out << " " << d;
  out << "\n";
  for (int i = 0; i < g.N; ++i) {
    for (int k = 0; k < g.N; ++k) {
      if (i == k || !g.has_q(i, k)) continue;
      out << "Q " << i + 1 << " " << k + 1 << "\n";
      const Mat& m = g.q(i, k);
      for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) out << (c ? " " : "") << format_double(m.at(r, c));
        out << "\n";
      }
    }
  }
  for (int i = 0; i < g.N; ++i) {
    out << "r " << i + 1 << "\n";
    for (int c = 0; c <= g.dims[i]; ++c) out << (c ? " " : "") << format_double(g.r[i][c]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing game file '" + path + "'");
}

PolymatrixGame gen_random_game(int N, const std::vector<int>& dims, double range,
                               std::uint64_t seed) {
  PolymatrixGame g = make_zero_game(N, dims);
  Rng rng(seed);
  // Draw order is part of the format: Q blocks row-major over ordered pairs,
  // then r vectors, so a seed pins the game exactly.
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < N; ++k) {
      if (i == k) continue;
      Mat m(dims[i] + 1, dims[k] + 1);
      for (double& v : m.data) v = rng.uniform(-range, range);
      g.set_q(i, k, std::move(m));
    }
  }
  for (int i = 0; i < N; ++i)
    for (int c = 0; c <= dims[i]; ++c) g.r[i][c] = rng.uniform(-range, range);
  return g;
}

PolymatrixGame build_game(const ExperimentConfig& cfg) {
  const int sources =
      (cfg.builtin.empty() ? 0 : 1) + (cfg.game_file.empty() ? 0 : 1) + (cfg.use_random ? 1 : 0);
  if (sources != 1)
    throw std::invalid_argument("exactly one game source must be set (builtin, game_file or "
                                "random); got " +
                                std::to_string(sources));
  PolymatrixGame g;
  if (!cfg.builtin.empty()) {
    if (cfg.builtin == "table1") {
      g = make_table1_game();
    } else if (cfg.builtin.rfind("zero:", 0) == 0) {
      // zero:N:d1,d2,...
      const std::string rest = cfg.builtin.substr(5);
      const size_t colon = rest.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("builtin zero game needs 'zero:N:d1,d2,...'");
      const int N = static_cast<int>(parse_long(rest.substr(0, colon), "builtin", "zero"));
      const std::vector<int> dims = parse_int_list(rest.substr(colon + 1), "builtin", "zero");
      if (static_cast<int>(dims.size()) != N)
        throw std::invalid_argument("builtin zero game: dimension count does not match N");
      g = make_zero_game(N, dims);
    } else {
      throw std::invalid_argument("unknown builtin game '" + cfg.builtin + "'");
    }
  } else if (!cfg.game_file.empty()) {
    g = load_game_file(cfg.game_file);
  } else {
    if (static_cast<int>(cfg.random_dims.size()) != cfg.random_players)
      throw std::invalid_argument("random game: random_dims must list one entry per player");
    g = gen_random_game(cfg.random_players, cfg.random_dims, cfg.random_range, cfg.random_seed);
  }
  if (cfg.utility_scale != 1.0) scale_utilities(g, cfg.utility_scale);
  const std::vector<std::string> bad = validate_game(g);
  if (!bad.empty()) throw std::invalid_argument("configured game is invalid: " + bad.front());
  return g;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

CommGraph build_configured_graph(const ExperimentConfig& cfg, int N) {
  if (cfg.graph_topology == "custom") {
    if (cfg.custom_edges.empty())
      throw std::invalid_argument("topology 'custom' needs at least one edge entry");
    return build_graph_custom(N, cfg.custom_edges, cfg.beta);
  }
  return build_graph(N, cfg.graph_topology, cfg.beta);
}

void write_config_echo(const ExperimentConfig& cfg, const TauParams& params,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  if (!cfg.builtin.empty()) out << "builtin = " << cfg.builtin << "\n";
  if (!cfg.game_file.empty()) out << "game_file = " << cfg.game_file << "\n";
  if (cfg.use_random) {
    out << "random = true\n";
    out << "random_players = " << cfg.random_players << "\n";
    out << "random_dims = ";
    for (size_t i = 0; i < cfg.random_dims.size(); ++i)
      out << (i ? "," : "") << cfg.random_dims[i];
    out << "\n";
    out << "random_range = " << format_double(cfg.random_range) << "\n";
    out << "random_seed = " << cfg.random_seed << "\n";
  }
  out << "epsilon = " << format_double(params.epsilon) << "\n";
  out << "tau = " << format_double(params.tau) << "\n";
  out << "strict_tau = " << (cfg.strict_tau ? "true" : "false") << "\n";
  out << "utility_scale = " << format_double(cfg.utility_scale) << "\n";
  out << "algorithm = " << cfg.algorithm << "\n";
  if (cfg.algorithm == "pgd") {
    out << "gamma0 = " << format_double(cfg.pgd.gamma0) << "\n";
    out << "schedule = " << schedule_to_string(cfg.pgd.schedule) << "\n";
    if (cfg.pgd.schedule == Schedule::power)
      out << "power_a = " << format_double(cfg.pgd.power_a) << "\n";
    out << "max_iters = " << cfg.pgd.max_iters << "\n";
    out << "restart_threshold = " << format_double(cfg.pgd.restart_threshold) << "\n";
    out << "max_restarts = " << cfg.pgd.max_restarts << "\n";
    out << "stop_residual = " << format_double(cfg.pgd.stop_residual) << "\n";
  } else {
    out << "eta = " << format_double(cfg.fp.eta) << "\n";
    out << "max_iters = " << cfg.fp.max_iters << "\n";
    out << "stop_distance = " << format_double(cfg.fp.stop_distance) << "\n";
  }
  out << "seed = " << cfg.seed << "\n";
  out << "topology = " << cfg.graph_topology << "\n";
  out << "beta = " << format_double(cfg.beta) << "\n";
  for (const auto& [i, k, w] : cfg.custom_edges)
    out << "edge = " << i + 1 << "," << k + 1 << "," << format_double(w) << "\n";
  out << "thin = " << cfg.thin << "\n";
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const PolymatrixGame g = build_game(cfg);
  const ReducedGame rg = transform(g);
  const TauParams params = resolve_tau(g, cfg.epsilon, cfg.tau, cfg.strict_tau);
  const TruncatedBox box = truncated_box(g, params.tau);
  const CommGraph graph = build_configured_graph(cfg, g.N);
  const ExtendedMixing M = extend(graph, g.dims);

  Rng rng(cfg.seed);
  const EstimateCloud init = random_cloud(rg.dims, box, rng);

  RunTrace trace;
  if (cfg.algorithm == "pgd") {
    PGDConfig pc = cfg.pgd;
    pc.seed = cfg.seed;
    pc.thin = cfg.thin;
    trace = run_pgd(rg, box, M, pc, init);
  } else if (cfg.algorithm == "fixed_point") {
    FixedPointConfig fc = cfg.fp;
    fc.seed = cfg.seed;
    fc.thin = cfg.thin;
    trace = run_fixed_point(rg, box, M, fc, init);
  } else {
    throw std::invalid_argument("algorithm must be 'pgd' or 'fixed_point', got '" +
                                cfg.algorithm + "'");
  }

  std::string outdir = cfg.outdir;
  if (outdir.empty()) {
    const char* env = std::getenv("POLYQRE_OUTDIR");
    outdir = env && *env ? env : ".";
  }
  std::filesystem::create_directories(outdir);
  const std::filesystem::path base(outdir);

  {
    std::ofstream csv(base / "trace.csv");
    if (!csv) throw std::runtime_error("cannot write '" + (base / "trace.csv").string() + "'");
    csv << "iter,total_residual,epsilon_gap,disagreement";
    for (int i = 0; i < g.N; ++i)
      for (int j = 0; j < g.dims[i]; ++j) csv << ",mean_p" << i + 1 << "_" << j + 1;
    csv << "\n";
    for (const TraceRow& row : trace.rows) {
      csv << row.iter << "," << format_double(row.total_residual) << ","
          << format_double(row.epsilon_gap) << "," << format_double(row.disagreement);
      for (double v : row.mean) csv << "," << format_double(v);
      csv << "\n";
    }
    if (!csv) throw std::runtime_error("failed writing trace.csv");
  }

  {
    std::ofstream sum(base / "summary.txt");
    if (!sum) throw std::runtime_error("cannot write '" + (base / "summary.txt").string() + "'");
    sum << "status: " << trace.status_string() << "\n";
    sum << "iterations: " << (trace.rows.empty() ? 0 : trace.rows.back().iter) << "\n";
    sum << "final_total_residual: " << format_double(trace.final_residual) << "\n";
    sum << "final_epsilon_gap: " << format_double(trace.final_gap) << "\n";
    sum << "final_disagreement: " << format_double(trace.final_disagreement) << "\n";
    if (cfg.algorithm == "fixed_point") {
      sum << "final_successive_distance: " << format_double(trace.final_successive_distance)
          << "\n";
      sum << "lipschitz_factor: " << format_double(trace.lipschitz_factor) << "\n";
    } else {
      sum << "restarts: " << trace.restarts << "\n";
    }
    sum << "epsilon: " << format_double(params.epsilon) << "\n";
    sum << "tau: " << format_double(params.tau) << "\n";
    sum << "tau_max: " << format_double(params.tau_max) << "\n";
    sum << "delta_f: " << format_double(params.delta_f) << "\n";
    sum << "delta_f_exact: " << (params.delta_exact ? "yes" : "no") << "\n";
    sum << "coefficient_radius: " << format_double(params.R) << "\n";
    sum << "epsilon_bound: " << format_double(params.epsilon_bound) << "\n";
    // Deviation flags: where the implementation departs from the idealized
    // arithmetic (substochastic rows patched on the diagonal, clamped box
    // bounds, rescaled utilities).
    sum << "mixing_diagonal_correction: " << format_double(M.max_correction) << "\n";
    sum << "mixing_correction_applied: " << (M.max_correction > 0.0 ? "yes" : "no") << "\n";
    sum << "box_lower_clamped: "
        << (box.lower == TruncatedBox::kLowerFloor ? "yes" : "no") << "\n";
    sum << "box_slack_clamped: "
        << (box.slack == TruncatedBox::kSlackFloor ? "yes" : "no") << "\n";
    sum << "utilities_rescaled: " << (cfg.utility_scale != 1.0 ? "yes" : "no") << "\n";
    sum << "wall_seconds: " << format_double(trace.wall_seconds) << "\n";
    sum << "final_mean:";
    for (double v : flatten(trace.final_mean)) sum << " " << format_double(v);
    sum << "\n";
    if (!sum) throw std::runtime_error("failed writing summary.txt");
  }

  write_config_echo(cfg, params, base / "config_echo.txt");

  log << "status " << trace.status_string() << ", final gap "
      << format_double(trace.final_gap) << ", residual " << format_double(trace.final_residual)
      << ", outputs in " << base.string() << "\n";
  return trace.status == RunStatus::converged ? 0 : 2;
}

int verify_point(const PolymatrixGame& g, const ReducedPoint& point, double epsilon, double tau,
                 std::ostream& out) {
  const ReducedGame rg = transform(g);
  const TauParams params = resolve_tau(g, epsilon, tau, false);
  const TruncatedBox box = truncated_box(g, params.tau);
  const JointAction lifted = lift(point);

  const double gap = epsilon_gap(g, lifted);
  out << "epsilon_gap: " << format_double(gap) << "\n";
  out << "epsilon: " << format_double(epsilon) << "\n";
  out << "eps_ne: " << (gap <= epsilon ? "yes" : "no") << "\n";
  for (int i = 0; i < g.N; ++i) {
    const BestResponseResult br = best_response(g, i, lifted);
    out << "player " << i + 1 << " best_response:";
    for (double c : br.coefficients) out << " " << format_double(c);
    out << "\n";
    out << "player " << i + 1 << " gap: " << format_double(br.gap) << "\n";
  }
  out << "tau: " << format_double(params.tau) << "\n";
  const StationarityReport rep = stationarity_report(rg, box, point, params.tau, 1e-10);
  for (const StationarityRecord& rec : rep.records) {
    out << "residual p" << rec.player + 1 << "_" << rec.coord + 1 << ": "
        << format_double(rec.residual) << " grad_norm " << format_double(rec.grad_norm)
        << (rec.at_lower ? " at_lower" : "") << (rec.at_cap ? " at_cap" : "") << "\n";
  }
  out << "stationarity: " << rep.classification << "\n";
  return 0;
}

}  // namespace polyqre
