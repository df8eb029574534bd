#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "polyqre/algorithms.hpp"
#include "polyqre/consensus.hpp"
#include "polyqre/game.hpp"
#include "polyqre/io.hpp"
#include "polyqre/oracles.hpp"
#include "polyqre/projection.hpp"
#include "polyqre/reduced.hpp"
#include "polyqre/rng.hpp"

namespace py = pybind11;
using namespace polyqre;

namespace {

using NestedList = std::vector<std::vector<double>>;

ReducedPoint to_point(const NestedList& x) {
  ReducedPoint p;
  p.x = x;
  return p;
}

py::dict trace_to_dict(const RunTrace& trace) {
  py::dict d;
  d["status"] = trace.status_string();
  d["restarts"] = trace.restarts;
  d["iterations"] = trace.rows.empty() ? 0L : trace.rows.back().iter;
  d["final_residual"] = trace.final_residual;
  d["final_gap"] = trace.final_gap;
  d["final_disagreement"] = trace.final_disagreement;
  d["final_successive_distance"] = trace.final_successive_distance;
  d["lipschitz_factor"] = trace.lipschitz_factor;
  d["mean"] = trace.final_mean.x;
  py::list rows;
  for (const TraceRow& r : trace.rows) {
    py::dict row;
    row["iter"] = r.iter;
    row["total_residual"] = r.total_residual;
    row["epsilon_gap"] = r.epsilon_gap;
    row["disagreement"] = r.disagreement;
    row["mean"] = r.mean;
    rows.append(row);
  }
  d["trace"] = rows;
  return d;
}

py::dict run_impl(const PolymatrixGame& g, const std::string& algorithm, double epsilon,
                  double tau, bool strict_tau, const std::string& topology, double beta,
                  std::uint64_t seed, long max_iters, double eta, double stop_distance,
                  double gamma0, const std::string& schedule, double stop_residual, int thin) {
  const ReducedGame rg = transform(g);
  const TauParams params = resolve_tau(g, epsilon, tau, strict_tau);
  const TruncatedBox box = truncated_box(g, params.tau);
  const ExtendedMixing M = extend(build_graph(g.N, topology, beta), g.dims);
  Rng rng(seed);
  const EstimateCloud init = random_cloud(rg.dims, box, rng);

  RunTrace trace;
  if (algorithm == "pgd") {
    PGDConfig pc;
    pc.gamma0 = gamma0;
    pc.schedule = schedule_from_string(schedule);
    pc.max_iters = max_iters;
    pc.stop_residual = stop_residual;
    pc.seed = seed;
    pc.thin = thin;
    trace = run_pgd(rg, box, M, pc, init);
  } else if (algorithm == "fixed_point") {
    FixedPointConfig fc;
    fc.eta = eta;
    fc.max_iters = max_iters;
    fc.stop_distance = stop_distance;
    fc.seed = seed;
    fc.thin = thin;
    trace = run_fixed_point(rg, box, M, fc, init);
  } else {
    throw std::invalid_argument("algorithm must be 'pgd' or 'fixed_point'");
  }
  py::dict d = trace_to_dict(trace);
  d["tau"] = params.tau;
  d["tau_max"] = params.tau_max;
  d["epsilon"] = params.epsilon;
  return d;
}

py::dict params_to_dict(const TauParams& p) {
  py::dict d;
  d["epsilon"] = p.epsilon;
  d["tau"] = p.tau;
  d["tau_max"] = p.tau_max;
  d["delta_f"] = p.delta_f;
  d["R"] = p.R;
  d["delta_exact"] = p.delta_exact;
  d["epsilon_bound"] = p.epsilon_bound;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "approximate Nash equilibria of polymatrix games via entropy regularization";

  py::class_<PolymatrixGame>(m, "Game")
      .def_property_readonly("N", [](const PolymatrixGame& g) { return g.N; })
      .def_property_readonly("dims", [](const PolymatrixGame& g) { return g.dims; })
      .def("q",
           [](const PolymatrixGame& g, int i, int k) {
             if (i < 0 || i >= g.N || k < 0 || k >= g.N || i == k || !g.has_q(i, k))
               throw std::out_of_range("no Q block for this player pair");
             const Mat& q = g.q(i, k);
             NestedList rows(q.rows);
             for (int r = 0; r < q.rows; ++r)
               rows[r] = std::vector<double>(q.data.begin() + static_cast<size_t>(r) * q.cols,
                                             q.data.begin() + static_cast<size_t>(r + 1) * q.cols);
             return rows;
           },
           py::arg("i"), py::arg("k"))
      .def("r",
           [](const PolymatrixGame& g, int i) {
             if (i < 0 || i >= g.N) throw std::out_of_range("player index out of range");
             return g.r[i];
           },
           py::arg("i"))
      .def("__repr__", [](const PolymatrixGame& g) {
        std::ostringstream os;
        os << "Game(N=" << g.N << ", dims=[";
        for (size_t i = 0; i < g.dims.size(); ++i) os << (i ? ", " : "") << g.dims[i];
        os << "])";
        return os.str();
      });

  m.def("table1", &make_table1_game, "the built-in two-driver anti-coordination game");
  m.def("zero_game", &make_zero_game, py::arg("N"), py::arg("dims"));
  m.def("random_game", &gen_random_game, py::arg("N"), py::arg("dims"), py::arg("range"),
        py::arg("seed"));
  m.def("load_game", &load_game_file, py::arg("path"));
  m.def("save_game", &save_game_file, py::arg("game"), py::arg("path"));
  m.def("validate", &validate_game, py::arg("game"));

  m.def("utility", &utility, py::arg("game"), py::arg("i"), py::arg("x"));
  m.def(
      "best_response",
      [](const PolymatrixGame& g, int i, const JointAction& x) {
        const BestResponseResult br = best_response(g, i, x);
        py::dict d;
        d["coefficients"] = br.coefficients;
        d["best_value"] = br.best_value;
        d["current_value"] = br.current_value;
        d["gap"] = br.gap;
        return d;
      },
      py::arg("game"), py::arg("i"), py::arg("x"));
  m.def("epsilon_gap", &epsilon_gap, py::arg("game"), py::arg("x"));
  m.def(
      "delta_f",
      [](const PolymatrixGame& g) {
        const DeltaF d = delta_f(g);
        return py::make_tuple(d.value, d.exact);
      },
      py::arg("game"));

  m.def(
      "lift", [](const NestedList& x) { return lift(to_point(x)); }, py::arg("x"),
      "append each player's eliminated coordinate 1 - sum x_i");
  m.def(
      "reduce_point",
      [](const JointAction& x) { return reduce_point(x).x; }, py::arg("x"));
  m.def(
      "total_residual",
      [](const PolymatrixGame& g, const NestedList& x, double tau) {
        return total_residual(transform(g), to_point(x), tau);
      },
      py::arg("game"), py::arg("x"), py::arg("tau"));
  m.def(
      "residual_root",
      [](const PolymatrixGame& g, const NestedList& x, int i, int j, double tau) {
        return residual_root(transform(g), to_point(x), i, j, tau);
      },
      py::arg("game"), py::arg("x"), py::arg("i"), py::arg("j"), py::arg("tau"));
  m.def(
      "grad_residual",
      [](const PolymatrixGame& g, const NestedList& x, int i, int j, double tau) {
        return grad_residual(transform(g), to_point(x), i, j, tau);
      },
      py::arg("game"), py::arg("x"), py::arg("i"), py::arg("j"), py::arg("tau"));
  m.def(
      "pseudo_gradient",
      [](const PolymatrixGame& g, const NestedList& x, double tau) {
        return pseudo_gradient(transform(g), to_point(x), tau);
      },
      py::arg("game"), py::arg("x"), py::arg("tau"));

  m.def("tau_params", [](const PolymatrixGame& g) { return params_to_dict(tau_max_params(g)); },
        py::arg("game"));
  m.def(
      "resolve_tau",
      [](const PolymatrixGame& g, double epsilon, double tau, bool strict) {
        return params_to_dict(resolve_tau(g, epsilon, tau, strict));
      },
      py::arg("game"), py::arg("epsilon"), py::arg("tau") = -1.0, py::arg("strict") = false);
  m.def(
      "box",
      [](const PolymatrixGame& g, double tau) {
        const TruncatedBox b = truncated_box(g, tau);
        py::dict d;
        d["tau"] = b.tau;
        d["lower"] = b.lower;
        d["log_lower"] = b.log_lower;
        d["slack"] = b.slack;
        d["log_slack"] = b.log_slack;
        d["upper"] = b.upper();
        return d;
      },
      py::arg("game"), py::arg("tau"));

  m.def(
      "project",
      [](const std::vector<double>& y, double lb, double ub) { return project(y, lb, ub).point; },
      py::arg("y"), py::arg("lb"), py::arg("ub"),
      "projection onto {x >= lb, sum x <= ub}");

  m.def(
      "lambda2",
      [](int N, const std::string& topology, double beta, const std::vector<int>& dims) {
        return lambda2(extend(build_graph(N, topology, beta), dims));
      },
      py::arg("N"), py::arg("topology"), py::arg("beta"), py::arg("dims"));

  m.def("run", &run_impl, py::arg("game"), py::arg("algorithm") = "fixed_point",
        py::arg("epsilon") = 0.05, py::arg("tau") = -1.0, py::arg("strict_tau") = false,
        py::arg("topology") = "complete", py::arg("beta") = 0.5, py::arg("seed") = 0,
        py::arg("max_iters") = 10000L, py::arg("eta") = 0.1, py::arg("stop_distance") = 1e-10,
        py::arg("gamma0") = 5.0, py::arg("schedule") = "harmonic",
        py::arg("stop_residual") = 1e-12, py::arg("thin") = 1,
        "run one distributed experiment and return the trace as a dict");

  m.def(
      "grid_qre_search",
      [](const PolymatrixGame& g, double tau, double step) {
        const ReducedGame rg = transform(g);
        const GridSearchResult res = grid_qre_search(rg, truncated_box(g, tau), tau, step);
        return py::make_tuple(res.point.x, res.residual);
      },
      py::arg("game"), py::arg("tau"), py::arg("step"));
  m.def("bisect_symmetric_qre", &bisect_symmetric_qre, py::arg("q"), py::arg("r"), py::arg("tau"),
        py::arg("tol") = 1e-12);
}
