#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "oversmooth/cli.hpp"
#include "oversmooth/errors.hpp"
#include "oversmooth/metrics.hpp"
#include "oversmooth/partition.hpp"
#include "oversmooth/propcheck.hpp"

namespace py = pybind11;
using namespace oversmooth;

namespace {

py::dict report_dict(const PropReport& r) {
  py::dict d;
  d["id"] = r.id;
  d["verdict"] = std::string(to_string(r.verdict));
  d["trials"] = r.trials;
  d["successes"] = r.successes;
  d["bound"] = r.bound ? py::cast(*r.bound) : py::none();
  d["evidence"] = r.evidence;
  d["note"] = r.note;
  return d;
}

py::dict trace_dict(const ConvergenceTrace& t) {
  py::dict d;
  d["verdict"] = std::string(to_string(t.verdict));
  d["qs"] = t.qs;
  d["projections"] = t.projections;
  d["slopes"] = t.slopes;
  d["target_rate"] = t.target_rate;
  d["final_topk_distance"] = t.final_topk_distance;
  d["note"] = t.note;
  return d;
}

LayerVariant make_variant(const std::string& name, const py::dict& params) {
  auto get = [&](const char* key, auto fallback) {
    return params.contains(key) ? params[key].cast<decltype(fallback)>() : fallback;
  };
  if (name == "vanilla") return layer::Vanilla{};
  if (name == "residual") return layer::Residual{get("alpha", 0.2), get("identity_w2", false)};
  if (name == "batchnorm") return layer::BatchNorm{};
  if (name == "pairnorm") return layer::PairNorm{get("scale", 1.0)};
  if (name == "graphnorm") return layer::GraphNorm{get("tau", Vector())};
  if (name == "graphnormv2")
    return layer::GraphNormV2{get("k", std::size_t{1}), get("tau", Matrix()), get("gaussian_tau", false)};
  if (name == "powerembed") return layer::PowerEmbed{};
  throw ParseError("unknown variant '" + name + "'");
}

CheckOptions options(std::size_t steps, std::size_t trials, std::uint64_t seed, std::size_t jobs) {
  CheckOptions o;
  o.steps = steps;
  o.trials = trials;
  o.seed = seed;
  o.jobs = jobs;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Oversmoothing dynamics of graph layers: graphs, spectra, layers, metrics and checks.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  auto domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DegenerateColumnError>(m, "DegenerateColumnError", domain.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<SetupError>(m, "SetupError", base.ptr());

  py::enum_<OperatorKind>(m, "OperatorKind")
      .value("Adjacency", OperatorKind::Adjacency)
      .value("SymNormalized", OperatorKind::SymNormalized)
      .value("RowStochastic", OperatorKind::RowStochastic)
      .value("Centered", OperatorKind::Centered);

  py::enum_<Nonlinearity>(m, "Nonlinearity")
      .value("Identity", Nonlinearity::Identity)
      .value("Relu", Nonlinearity::Relu);

  py::class_<Graph>(m, "Graph")
      .def(py::init([](std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& es) {
             std::vector<Edge> edges;
             for (const auto& [u, v, w] : es) edges.push_back({u, v, w});
             return Graph(n, std::move(edges));
           }),
           py::arg("n"), py::arg("edges"))
      .def_static("generate", [](const std::string& spec, std::uint64_t seed) {
        return gen_graph(parse_generator_spec(spec), seed);
      }, py::arg("spec"), py::arg("seed") = 0)
      .def_static("parse", [](const std::string& text) { return parse_edge_list(std::string_view(text)); })
      .def_property_readonly("size", &Graph::size)
      .def_property_readonly("edges", [](const Graph& g) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.w);
        return out;
      })
      .def("adjacency", &Graph::adjacency)
      .def("degrees", &Graph::degrees)
      .def("is_connected", &Graph::is_connected)
      .def("is_regular", &Graph::is_regular, py::arg("tol") = 1e-12)
      .def("largest_component", &Graph::largest_component)
      .def("__len__", &Graph::size);

  py::class_<OperatorMatrix>(m, "Operator")
      .def(py::init<Matrix, OperatorKind, double>(), py::arg("data"), py::arg("kind"), py::arg("tau") = 0.0)
      .def_property_readonly("data", &OperatorMatrix::data)
      .def_property_readonly("kind", &OperatorMatrix::kind)
      .def_property_readonly("symmetric", &OperatorMatrix::symmetric)
      .def_property_readonly("tau", &OperatorMatrix::tau)
      .def_property_readonly("size", &OperatorMatrix::size)
      .def("spectral_radius", &OperatorMatrix::spectral_radius)
      .def("dominant_vector", [](const OperatorMatrix& a) { return ReferenceVector::dominant(a).v(); });

  m.def("build_operator", [](const Graph& g, const std::string& kind) {
    return build_operator(g, parse_operator_kind(kind));
  }, py::arg("graph"), py::arg("kind") = "symnorm");
  m.def("center_operator", &center_operator, py::arg("a"), py::arg("tau"));

  // spectral
  auto eig_pair = [](const EigenSystem& es) { return py::make_tuple(es.values, es.vectors); };
  m.def("symmetric_eig", [eig_pair](const OperatorMatrix& a) { return eig_pair(symmetric_eig(a)); });
  m.def("centered_eig", [eig_pair](const OperatorMatrix& a, double tau) {
    return eig_pair(centered_eig(a, tau));
  }, py::arg("a"), py::arg("tau") = 1.0);
  m.def("numerical_rank", &numerical_rank, py::arg("x"), py::arg("rel_tol") = 1e-10);
  m.def("subspace_distance", &subspace_distance, py::arg("x"), py::arg("basis"));
  m.def("krylov_basis", [](const OperatorMatrix& a, const Matrix& x0) { return krylov_basis(a, x0).basis; });

  // partition
  m.def("wl_refine", [](const Graph& g) {
    const auto ep = wl_refine(g);
    return py::make_tuple(ep.m, ep.colors);
  });
  m.def("quotient", [](const Graph& g) { return quotient(g, wl_refine(g)).a_pi; });
  m.def("check_centering_effect", [](const Graph& g, double tau) {
    const auto r = check_centering_effect(g, tau);
    py::dict d;
    d["regular"] = r.regular;
    d["claim1_max_residual"] = r.claim1_max_residual;
    d["claim1"] = r.claim1;
    d["claim2_residual"] = r.claim2_residual;
    d["claim2_applicable"] = r.claim2_applicable;
    d["claim2"] = r.claim2;
    d["trace_gap"] = r.trace_gap;
    d["trace_gap_expected"] = r.trace_gap_expected;
    d["claim3_applicable"] = r.claim3_applicable;
    d["claim3"] = r.claim3;
    return d;
  }, py::arg("graph"), py::arg("tau") = 1.0);

  // metrics
  m.def("mu", py::overload_cast<const Matrix&, const Vector&>(&mu), py::arg("x"), py::arg("v"));
  m.def("dirichlet", &dirichlet, py::arg("graph"), py::arg("x"));
  m.def("col_distance", &col_distance);
  m.def("col_projection_distance", &col_projection_distance);

  // layers
  m.def("batch_norm", &batch_norm, py::arg("x"), py::arg("eps_floor") = py::none());
  m.def("pair_norm", &pair_norm, py::arg("x"), py::arg("s") = 1.0, py::arg("eps_floor") = py::none());
  m.def("graph_norm", &graph_norm, py::arg("x"), py::arg("tau"), py::arg("gamma"), py::arg("beta"),
        py::arg("eps_floor") = py::none());
  m.def("run_trajectory",
        [](const OperatorMatrix& a, const Matrix& x0, const std::string& variant, std::size_t steps,
           std::uint64_t seed, const py::dict& params, Nonlinearity nl, std::optional<double> weight_std) {
          LayerConfig cfg;
          cfg.variant = make_variant(variant, params);
          cfg.nonlinearity = nl;
          cfg.weights.std = weight_std;
          cfg.validate(a.size());
          Rng rng(seed);
          std::vector<double> mus;
          const Vector v = ReferenceVector::dominant(a).v();
          const auto log = run_trajectory(a, x0, cfg, steps, rng, nullptr,
                                          {[&](std::size_t, const FeatureMatrix& x) { mus.push_back(mu(x, v)); }});
          py::dict d;
          d["features"] = log.final_features;
          d["steps_done"] = log.steps_done;
          d["mu_v"] = mus;
          d["aborted"] = log.abort ? py::cast(log.abort->reason) : py::none();
          return d;
        },
        py::arg("a"), py::arg("x0"), py::arg("variant") = "vanilla", py::arg("steps") = 256,
        py::arg("seed") = 0, py::arg("params") = py::dict(), py::arg("nonlinearity") = Nonlinearity::Identity,
        py::arg("weight_std") = py::none());
  m.def("random_features", &random_features, py::arg("n"), py::arg("k"), py::arg("seed"));

  // checks
  m.def("check_prop1", [](const OperatorMatrix& a, const Matrix& x0, const Vector& v, double alpha,
                          std::size_t steps, std::size_t trials, std::uint64_t seed, std::size_t jobs) {
    return report_dict(check_prop1_residual_no_collapse(a, x0, v, alpha, options(steps, trials, seed, jobs)));
  }, py::arg("a"), py::arg("x0"), py::arg("v"), py::arg("alpha") = 0.2, py::arg("steps") = 256,
        py::arg("trials") = 50, py::arg("seed") = 0, py::arg("jobs") = 0);
  m.def("prop2_epsilon", &prop2_epsilon);
  m.def("prop2_probability", &prop2_probability);
  m.def("check_prop2", [](const OperatorMatrix& a, const Matrix& x0, double alpha, double eps,
                          std::size_t steps, std::size_t trials, std::uint64_t seed, std::size_t jobs) {
    return report_dict(check_prop2_signal_retention(a, x0, alpha, eps, options(steps, trials, seed, jobs)));
  }, py::arg("a"), py::arg("x0"), py::arg("alpha"), py::arg("eps"), py::arg("steps") = 64,
        py::arg("trials") = 200, py::arg("seed") = 0, py::arg("jobs") = 0);
  m.def("check_prop3", [](const OperatorMatrix& a, const Matrix& x0, const Matrix& y,
                          std::size_t random_schedules, std::uint64_t seed) {
    return report_dict(check_prop3_krylov_reachability(a, x0, y, random_schedules, seed));
  }, py::arg("a"), py::arg("x0"), py::arg("y"), py::arg("random_schedules") = 8, py::arg("seed") = 0);
  m.def("check_prop4", [](const OperatorMatrix& a, const Matrix& x0, const Vector& v, std::size_t steps,
                          std::size_t trials, std::uint64_t seed, std::size_t jobs) {
    return report_dict(check_prop4_bn_no_collapse(a, x0, v, options(steps, trials, seed, jobs)));
  }, py::arg("a"), py::arg("x0"), py::arg("v"), py::arg("steps") = 256, py::arg("trials") = 50,
        py::arg("seed") = 0, py::arg("jobs") = 0);
  m.def("check_prop5", [](const OperatorMatrix& a, const Matrix& x0, std::size_t k, std::size_t steps,
                          std::uint64_t seed) {
    return trace_dict(check_prop5_topk_convergence(a, x0, k, options(steps, 1, seed, 1)));
  }, py::arg("a"), py::arg("x0"), py::arg("k"), py::arg("steps") = 256, py::arg("seed") = 0);
  m.def("check_prop6", [](const OperatorMatrix& a, const Matrix& x0, std::size_t k, double eps) {
    return report_dict(check_prop6_tightness(a, x0, k, eps));
  }, py::arg("a"), py::arg("x0"), py::arg("k"), py::arg("eps") = 0.01);
  m.def("check_prop7", [](const Graph& g, double tau) { return report_dict(check_prop7_centering(g, tau)); },
        py::arg("graph"), py::arg("tau") = 1.0);
  m.def("check_vanilla", [](const Graph& g, const Matrix& x0, std::size_t steps, std::uint64_t seed,
                            bool cap_weights) {
    return trace_dict(check_vanilla_oversmoothing(g, x0, options(steps, 1, seed, 1), cap_weights));
  }, py::arg("graph"), py::arg("x0"), py::arg("steps") = 256, py::arg("seed") = 0,
        py::arg("cap_weights") = true);

  m.def("cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "oversmooth");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command line with `args` and returns (exit code, stdout, stderr).");
}
