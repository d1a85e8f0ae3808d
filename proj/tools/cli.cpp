#include "oversmooth/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "oversmooth/errors.hpp"
#include "oversmooth/partition.hpp"
#include "oversmooth/spectral.hpp"

namespace oversmooth::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kMetricNames{"mu_v", "dirichlet", "d_col", "d_pcol",
                                            "d_ev", "rank", "top_k_dist"};
const std::vector<std::string> kVariantNames{"vanilla",   "residual",  "batchnorm", "pairnorm",
                                             "graphnorm", "graphnormv2", "powerembed"};
const std::vector<std::string> kPropIds{"1", "2", "3", "4", "5", "6", "7", "vanilla"};

bool contains(const std::vector<std::string>& list, const std::string& s) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

template <class T>
void read_key(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config key \"") + key + "\": " + e.what());
  }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& field) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    field.reset();
    return;
  }
  T value{};
  read_key(j, key, value);
  field = value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Orthonormal basis of the span of the given columns.
Matrix orthonormalize(const Matrix& cols) {
  if (cols.cols() == 0) return cols;
  Eigen::HouseholderQR<Matrix> qr(cols);
  return qr.householderQ() * Matrix::Identity(cols.rows(), cols.cols());
}

Matrix leading_basis(const OperatorMatrix& a, std::size_t width) {
  const auto es = a.symmetric() ? symmetric_eig(a) : general_eig(a.data());
  const auto w = width == 0 ? static_cast<std::size_t>(es.size()) : width;
  return orthonormalize(top_k(es, w));
}

Matrix centered_basis(const OperatorMatrix& a, std::size_t k) {
  if (k == 0) return {};
  const auto ce = centered_eig(a, 1.0);
  std::vector<Index> idx;
  for (Index i = 0; i < ce.size() && idx.size() < k; ++i)
    if (!ce.kernel_index || *ce.kernel_index != i) idx.push_back(i);
  if (idx.size() < k) throw DomainError("top_k exceeds the centered spectrum");
  Matrix cols(a.size(), static_cast<Index>(k));
  for (std::size_t i = 0; i < k; ++i) cols.col(static_cast<Index>(i)) = ce.vectors.col(idx[i]);
  return orthonormalize(cols);
}

std::string record_field(const MetricRecord& r, const std::string& name) {
  if (name == "mu_v") return format_real(r.mu_v);
  if (name == "dirichlet") return format_real(r.dirichlet);
  if (name == "d_col") return format_real(r.d_col);
  if (name == "d_pcol") return format_real(r.d_pcol);
  if (name == "d_ev") return format_real(r.d_ev);
  if (name == "rank") return std::to_string(r.rank);
  return format_real(r.top_k_dist);
}

double record_value(const MetricRecord& r, const std::string& name) {
  if (name == "mu_v") return r.mu_v;
  if (name == "dirichlet") return r.dirichlet;
  if (name == "d_col") return r.d_col;
  if (name == "d_pcol") return r.d_pcol;
  if (name == "d_ev") return r.d_ev;
  if (name == "rank") return static_cast<double>(r.rank);
  return r.top_k_dist;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
}

}  // namespace

void RunConfig::validate() const {
  if (steps < 1) throw ParseError("steps must be >= 1");
  if (seeds.empty()) throw ParseError("seeds must not be empty");
  if (k < 1 && !features) throw ParseError("k must be >= 1");
  if (variants.empty()) throw ParseError("variants must not be empty");
  for (const auto& v : variants)
    if (!contains(kVariantNames, v))
      throw ParseError("unknown variant \"" + v + "\" (" + join(kVariantNames, "|") + ")");
  for (const auto& m : metrics)
    if (!contains(kMetricNames, m))
      throw ParseError("unknown metric \"" + m + "\" (" + join(kMetricNames, "|") + ")");
  if (weights != "gaussian" && weights != "identity")
    throw ParseError("weights must be gaussian or identity");
  if (op == OperatorKind::Centered) throw ParseError("operator must not be centered");
  if (reference == ReferenceKind::Custom) throw ParseError("reference must be ones|degree|dominant");
  if (!(rank_tol > 0.0)) throw ParseError("rank_tol must be positive");
  if (output.empty()) throw ParseError("output must not be empty");
}

json to_json(const RunConfig& c) {
  json j;
  j["graph"] = c.graph;
  j["graph_seed"] = c.graph_seed;
  j["features"] = c.features ? json(*c.features) : json(nullptr);
  j["raw_features"] = c.raw_features;
  j["k"] = c.k;
  j["operator"] = std::string(to_string(c.op));
  j["variants"] = c.variants;
  j["alpha"] = c.alpha;
  j["identity_w2"] = c.identity_w2;
  j["pairnorm_scale"] = c.pairnorm_scale;
  j["graphnorm_tau"] = c.graphnorm_tau;
  j["gnv2_k"] = c.gnv2_k;
  j["gnv2_gaussian_tau"] = c.gnv2_gaussian_tau;
  j["nonlinearity"] = std::string(to_string(c.nonlinearity));
  j["weights"] = c.weights;
  j["weight_mean"] = c.weight_mean;
  j["weight_std"] = c.weight_std ? json(*c.weight_std) : json(nullptr);
  j["eps_floor"] = c.eps_floor ? json(*c.eps_floor) : json(nullptr);
  j["steps"] = c.steps;
  j["seeds"] = c.seeds;
  j["metrics"] = c.metrics;
  j["reference"] = std::string(to_string(c.reference));
  j["ev_width"] = c.ev_width;
  j["top_k"] = c.top_k;
  j["rank_tol"] = c.rank_tol;
  j["output"] = c.output;
  j["jobs"] = c.jobs;
  return j;
}

RunConfig from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  const auto known = to_json(c);
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ParseError("unknown config key \"" + key + "\"");
  read_key(j, "graph", c.graph);
  read_key(j, "graph_seed", c.graph_seed);
  read_optional(j, "features", c.features);
  read_key(j, "raw_features", c.raw_features);
  read_key(j, "k", c.k);
  if (j.contains("operator")) c.op = parse_operator_kind(j.at("operator").get<std::string>());
  read_key(j, "variants", c.variants);
  read_key(j, "alpha", c.alpha);
  read_key(j, "identity_w2", c.identity_w2);
  read_key(j, "pairnorm_scale", c.pairnorm_scale);
  read_key(j, "graphnorm_tau", c.graphnorm_tau);
  read_key(j, "gnv2_k", c.gnv2_k);
  read_key(j, "gnv2_gaussian_tau", c.gnv2_gaussian_tau);
  if (j.contains("nonlinearity"))
    c.nonlinearity = parse_nonlinearity(j.at("nonlinearity").get<std::string>());
  read_key(j, "weights", c.weights);
  read_key(j, "weight_mean", c.weight_mean);
  read_optional(j, "weight_std", c.weight_std);
  read_optional(j, "eps_floor", c.eps_floor);
  read_key(j, "steps", c.steps);
  read_key(j, "seeds", c.seeds);
  read_key(j, "metrics", c.metrics);
  if (j.contains("reference"))
    c.reference = parse_reference_kind(j.at("reference").get<std::string>());
  read_key(j, "ev_width", c.ev_width);
  read_key(j, "top_k", c.top_k);
  read_key(j, "rank_tol", c.rank_tol);
  read_key(j, "output", c.output);
  read_key(j, "jobs", c.jobs);
  return c;
}

Graph load_graph(const std::string& source, std::uint64_t seed) {
  std::error_code ec;
  if (fs::is_regular_file(source, ec)) return parse_edge_list(read_file(source));
  return gen_graph(parse_generator_spec(source), seed);
}

LayerConfig layer_config(const RunConfig& cfg, const std::string& variant) {
  LayerConfig lc;
  if (variant == "vanilla") lc.variant = layer::Vanilla{};
  else if (variant == "residual") lc.variant = layer::Residual{cfg.alpha, cfg.identity_w2};
  else if (variant == "batchnorm") lc.variant = layer::BatchNorm{};
  else if (variant == "pairnorm") lc.variant = layer::PairNorm{cfg.pairnorm_scale};
  else if (variant == "graphnorm") {
    layer::GraphNorm gn;
    gn.tau = Eigen::Map<const Vector>(cfg.graphnorm_tau.data(),
                                      static_cast<Index>(cfg.graphnorm_tau.size()));
    lc.variant = gn;
  } else if (variant == "graphnormv2") {
    layer::GraphNormV2 gn;
    gn.k = cfg.gnv2_k;
    gn.gaussian_tau = cfg.gnv2_gaussian_tau;
    lc.variant = gn;
  } else if (variant == "powerembed") lc.variant = layer::PowerEmbed{};
  else throw ParseError("unknown variant \"" + variant + "\"");
  lc.nonlinearity = cfg.nonlinearity;
  lc.weights.mode =
      cfg.weights == "identity" ? WeightSpec::Mode::Identity : WeightSpec::Mode::Gaussian;
  lc.weights.mean = cfg.weight_mean;
  lc.weights.std = cfg.weight_std;
  lc.eps_floor = cfg.eps_floor;
  return lc;
}

FeatureMatrix initial_features(const RunConfig& cfg, const Graph& g, std::uint64_t seed) {
  FeatureMatrix x;
  if (cfg.features) {
    x = parse_feature_csv(read_file(*cfg.features), g.size());
  } else {
    Rng rng(derive_seed(seed, 0));
    x = gaussian_matrix(static_cast<Index>(g.size()), cfg.k, 0.0, 1.0, rng);
  }
  return cfg.raw_features ? x : normalize_columns(std::move(x));
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_row(const MetricRecord& r, const std::vector<std::string>& metrics) {
  std::string row = std::to_string(r.step);
  for (const auto& name : kMetricNames) {
    row += ',';
    if (contains(metrics, name)) row += record_field(r, name);
  }
  return row + '\n';
}

json report_json(const PropReport& r) {
  json j;
  j["id"] = r.id;
  j["verdict"] = std::string(to_string(r.verdict));
  j["trials"] = r.trials;
  j["successes"] = r.successes;
  j["bound"] = r.bound ? json(*r.bound) : json(nullptr);
  j["evidence"] = r.evidence;
  j["note"] = r.note;
  return j;
}

json trace_json(const std::string& id, const ConvergenceTrace& t) {
  json j;
  j["id"] = id;
  j["verdict"] = std::string(to_string(t.verdict));
  j["trials"] = 1;
  j["successes"] = t.verdict == Verdict::Pass ? 1 : 0;
  j["bound"] = t.target_rate;
  std::vector<json> slopes;
  for (double s : t.slopes) slopes.push_back(std::isfinite(s) ? json(s) : json(nullptr));
  j["evidence"] = slopes;
  j["final_topk_distance"] = t.final_topk_distance;
  j["note"] = t.note;
  return j;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& err) {
  cfg.validate();
  const Graph g = load_graph(cfg.graph, cfg.graph_seed);
  const auto a = build_operator(g, cfg.op);
  const auto n = static_cast<Index>(g.size());

  MetricContext ctx;
  ctx.rank_tol = cfg.rank_tol;
  if (contains(cfg.metrics, "mu_v")) ctx.v = ReferenceVector::make(cfg.reference, g, a).v();
  if (contains(cfg.metrics, "dirichlet")) ctx.graph = &g;
  if (contains(cfg.metrics, "d_ev")) ctx.full_basis = leading_basis(a, cfg.ev_width);
  if (contains(cfg.metrics, "top_k_dist")) ctx.topk_basis = centered_basis(a, cfg.top_k);

  std::vector<FeatureMatrix> x0s;
  for (auto seed : cfg.seeds) x0s.push_back(initial_features(cfg, g, seed));
  for (const auto& v : cfg.variants) layer_config(cfg, v).validate(n);

  const std::size_t runs = cfg.variants.size() * cfg.seeds.size();
  std::vector<TrajectoryLog> logs(runs);
  parallel_for(
      runs,
      [&](std::size_t i) {
        const auto vi = i / cfg.seeds.size(), si = i % cfg.seeds.size();
        const auto lc = layer_config(cfg, cfg.variants[vi]);
        Rng rng(derive_seed(cfg.seeds[si], 1));
        logs[i] = run_trajectory(a, x0s[si], lc, cfg.steps, rng, &ctx);
      },
      cfg.jobs);

  const fs::path dir(cfg.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ParseError("output path " + cfg.output + " is not writable");

  const std::string header = std::string(kMetricCsvHeader) + '\n';
  bool aborted = false;
  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
    const auto& variant = cfg.variants[vi];
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
      const auto& log = logs[vi * cfg.seeds.size() + si];
      std::string text = header;
      for (const auto& r : log.records) text += csv_row(r, cfg.metrics);
      if (log.abort) {
        aborted = true;
        text += "# aborted at step " + std::to_string(log.abort->step) + ": " + log.abort->reason +
                '\n';
        err << variant << " seed " << cfg.seeds[si] << ": aborted at step " << log.abort->step
            << ": " << log.abort->reason << '\n';
      }
      write_text(dir / (variant + "_seed" + std::to_string(cfg.seeds[si]) + ".csv"), text);
    }

    std::string agg = "step";
    for (const auto& m : kMetricNames) agg += "," + m + "_mean," + m + "_std";
    agg += '\n';
    for (std::size_t t = 0; t < cfg.steps; ++t) {
      std::vector<const MetricRecord*> rows;
      for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
        const auto& log = logs[vi * cfg.seeds.size() + si];
        if (t < log.records.size()) rows.push_back(&log.records[t]);
      }
      if (rows.empty()) break;
      agg += std::to_string(t + 1);
      for (const auto& m : kMetricNames) {
        if (!contains(cfg.metrics, m)) {
          agg += ",,";
          continue;
        }
        double mean = 0.0, var = 0.0;
        for (const auto* r : rows) mean += record_value(*r, m);
        mean /= static_cast<double>(rows.size());
        for (const auto* r : rows) var += std::pow(record_value(*r, m) - mean, 2);
        var /= static_cast<double>(rows.size());
        agg += "," + format_real(mean) + "," + format_real(std::sqrt(var));
      }
      agg += '\n';
    }
    write_text(dir / (variant + "_aggregate.csv"), agg);
  }
  return aborted ? kAborted : kOk;
}

int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream& err) {
  for (const auto& p : cfg.props)
    if (!contains(kPropIds, p))
      throw ParseError("unknown proposition \"" + p + "\" (" + join(kPropIds, "|") + ")");
  const Graph g = load_graph(cfg.graph, cfg.graph_seed);
  const auto a = build_operator(g, cfg.op);
  const auto n = static_cast<Index>(g.size());
  CheckOptions opt;
  opt.steps = cfg.steps;
  opt.trials = cfg.trials;
  opt.seed = derive_seed(cfg.seed, 1);
  opt.jobs = cfg.jobs;
  const FeatureMatrix x0 = random_features(n, cfg.k, derive_seed(cfg.seed, 0));

  json reports = json::array();
  bool failed = false;
  for (const auto& id : cfg.props) {
    json rep;
    try {
      if (id == "1") {
        rep = report_json(check_prop1_residual_no_collapse(
            a, x0, ReferenceVector::dominant(a).v(), cfg.alpha, opt));
      } else if (id == "2") {
        const double s = opt.weights.std_for(cfg.k);
        const double eps = prop2_epsilon(cfg.p, cfg.alpha, s);
        CheckOptions o2 = opt;
        o2.steps = std::min<std::size_t>(cfg.steps, 64);
        rep = report_json(check_prop2_signal_retention(a, x0, cfg.alpha, eps, o2));
      } else if (id == "3") {
        const FeatureMatrix x3 = random_features(n, 3, derive_seed(cfg.seed, 2));
        Rng rng(derive_seed(cfg.seed, 3));
        const Matrix y = gaussian_matrix(n, 3, 0.0, 1.0, rng);
        rep = report_json(check_prop3_krylov_reachability(a, x3, y, 8, derive_seed(cfg.seed, 4)));
      } else if (id == "4") {
        rep = report_json(check_prop4_bn_no_collapse(a, x0, ReferenceVector::all_ones(n).v(), opt));
      } else if (id == "5") {
        const auto k5 = std::min<std::size_t>(4, static_cast<std::size_t>(cfg.k));
        rep = trace_json("5", check_prop5_topk_convergence(a, x0.leftCols(k5), k5, opt));
      } else if (id == "6") {
        const auto k6 = std::min<std::size_t>(4, static_cast<std::size_t>(cfg.k));
        rep = report_json(check_prop6_tightness(a, x0.leftCols(k6), k6, cfg.eps));
      } else if (id == "7") {
        rep = report_json(check_prop7_centering(g, cfg.tau));
      } else {
        rep = trace_json("vanilla", check_vanilla_oversmoothing(g, x0, opt));
      }
    } catch (const SetupError& e) {
      PropReport r;
      r.id = id;
      r.note = std::string("precondition: ") + e.what();
      rep = report_json(r);
    }
    if (rep["verdict"] == "fail") {
      failed = true;
      err << "proposition " << id << " failed\n";
    }
    reports.push_back(rep);
  }
  json doc;
  doc["graph"] = cfg.graph;
  doc["graph_seed"] = cfg.graph_seed;
  doc["seed"] = cfg.seed;
  doc["reports"] = reports;
  const std::string text = doc.dump(2) + '\n';
  if (cfg.output) write_text(*cfg.output, text);
  else out << text;
  return failed ? kVerifyFailed : kOk;
}

int cmd_spectrum(const std::string& graph, std::uint64_t graph_seed, OperatorKind op,
                 std::optional<double> tau, bool vectors, bool partition, std::ostream& out) {
  const Graph g = load_graph(graph, graph_seed);
  const auto a = build_operator(g, op);
  EigenSystem es;
  if (tau) es = centered_eig(a, *tau);
  else es = a.symmetric() ? symmetric_eig(a) : general_eig(a.data());

  out << "index,eigenvalue";
  if (vectors)
    for (Index i = 0; i < a.size(); ++i) out << ",v" << i;
  out << '\n';
  for (Index i = 0; i < es.size(); ++i) {
    out << i << ',' << format_real(es.values(i));
    if (vectors)
      for (Index r = 0; r < es.vectors.rows(); ++r) out << ',' << format_real(es.vectors(r, i));
    out << '\n';
  }
  if (es.skipped_complex) out << "# skipped " << es.skipped_complex << " complex eigenvalues\n";
  if (es.defective) out << "# centered operator is defective at 0\n";
  if (!partition) return kOk;

  const auto ep = wl_refine(g);
  cmd_partition(graph, graph_seed, out);
  if (!a.symmetric() || tau) return kOk;
  const auto split = split_eigenpairs(es, ep);
  out << "# split\nindex,eigenvalue,structural\n";
  std::vector<bool> structural(static_cast<std::size_t>(es.size()), false);
  for (auto i : split.structural) structural[static_cast<std::size_t>(i)] = true;
  for (Index i = 0; i < es.size(); ++i)
    out << i << ',' << format_real(es.values(i)) << ','
        << (structural[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
  return kOk;
}

int cmd_partition(const std::string& graph, std::uint64_t graph_seed, std::ostream& out) {
  const Graph g = load_graph(graph, graph_seed);
  const auto ep = wl_refine(g);
  const auto q = quotient(g, ep);
  out << "# classes m=" << ep.m << "\nnode,class\n";
  for (std::size_t i = 0; i < ep.colors.size(); ++i) out << i << ',' << ep.colors[i] << '\n';
  out << "# quotient\n";
  for (Index r = 0; r < q.a_pi.rows(); ++r) {
    for (Index c = 0; c < q.a_pi.cols(); ++c) out << (c ? "," : "") << format_real(q.a_pi(r, c));
    out << '\n';
  }
  return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Oversmoothing dynamics of linearized graph networks.\n"
      "Graph sources are edge-list files or generator specs:\n"
      "  er:n,p  sbm:n1+n2,pin,pout  path:n  star:n  cycle:n  regular:n,d\n"
      "with an optional /lcc suffix keeping the largest connected component."};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run layer trajectories and write metric CSVs");
  std::optional<std::string> config_path, graph, features, op, nl, weights, reference, output,
      variants, seeds, metrics, graphnorm_tau;
  std::optional<std::uint64_t> graph_seed;
  std::optional<Index> k;
  std::optional<double> alpha, pairnorm_scale, weight_mean, weight_std, eps_floor, rank_tol;
  std::optional<std::size_t> steps, ev_width, top_k, gnv2_k, jobs;
  bool raw_features = false, identity_w2 = false, gnv2_gaussian = false, dump = false;
  sim->add_option("--config", config_path, "JSON config file");
  sim->add_option("--graph", graph, "edge-list path or generator spec");
  sim->add_option("--graph-seed", graph_seed, "generator seed");
  sim->add_option("--features", features, "feature CSV (n rows)");
  sim->add_flag("--raw-features", raw_features, "skip per-column normalization of X0");
  sim->add_option("-k,--k", k, "feature columns when features are drawn");
  sim->add_option("--operator", op, "adjacency|symnorm|rowstoch");
  sim->add_option("--variant", variants,
                  "comma list of vanilla|residual|batchnorm|pairnorm|graphnorm|graphnormv2|"
                  "powerembed");
  sim->add_option("--alpha", alpha, "residual mixing weight");
  sim->add_flag("--identity-w2", identity_w2, "residual W2 = I");
  sim->add_option("--pairnorm-scale", pairnorm_scale, "PairNorm s");
  sim->add_option("--graphnorm-tau", graphnorm_tau, "comma list of per-column tau");
  sim->add_option("--gnv2-k", gnv2_k, "eigenvectors in the GraphNormv2 basis");
  sim->add_flag("--gnv2-gaussian-tau", gnv2_gaussian, "Gaussian GraphNormv2 tau");
  sim->add_option("--nonlinearity", nl, "identity|relu");
  sim->add_option("--weights", weights, "gaussian|identity");
  sim->add_option("--weight-mean", weight_mean, "Gaussian weight mean");
  sim->add_option("--weight-std", weight_std, "Gaussian weight std (default 1/sqrt(k))");
  sim->add_option("--eps-floor", eps_floor, "normalization denominator floor");
  sim->add_option("--steps", steps, "layers to apply");
  sim->add_option("--seeds", seeds, "comma list of seeds");
  sim->add_option("--metrics", metrics, "comma list of CSV columns to fill");
  sim->add_option("--reference", reference, "ones|degree|dominant");
  sim->add_option("--ev-width", ev_width, "eigenvectors behind d_ev (0 = all)");
  sim->add_option("--top-k", top_k, "centered eigenvectors behind top_k_dist");
  sim->add_option("--rank-tol", rank_tol, "relative numerical-rank tolerance");
  sim->add_option("-o,--out", output, "output directory");
  sim->add_option("-j,--jobs", jobs, "worker threads (0 = all cores)");
  sim->add_flag("--dump-config", dump, "print the resolved config and exit");

  // verify
  auto* ver = app.add_subcommand("verify", "Numerically check the propositions");
  VerifyConfig vc;
  std::string props = join(vc.props, ",");
  std::string vop = "symnorm";
  ver->add_option("--props", props, "comma list of 1..7 and vanilla")->capture_default_str();
  ver->add_option("--graph", vc.graph, "edge-list path or generator spec")->capture_default_str();
  ver->add_option("--graph-seed", vc.graph_seed, "generator seed")->capture_default_str();
  ver->add_option("--seed", vc.seed, "feature and weight seed")->capture_default_str();
  ver->add_option("--operator", vop, "adjacency|symnorm|rowstoch")->capture_default_str();
  ver->add_option("--trials", vc.trials)->capture_default_str();
  ver->add_option("--steps", vc.steps)->capture_default_str();
  ver->add_option("-k,--k", vc.k)->capture_default_str();
  ver->add_option("--alpha", vc.alpha)->capture_default_str();
  ver->add_option("--p", vc.p, "target probability for proposition 2")->capture_default_str();
  ver->add_option("--eps", vc.eps, "tightness epsilon for proposition 6")->capture_default_str();
  ver->add_option("--tau", vc.tau, "centering strength for proposition 7")->capture_default_str();
  ver->add_option("-o,--out", vc.output, "JSON output file (default stdout)");
  ver->add_option("-j,--jobs", vc.jobs)->capture_default_str();

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "Print the operator spectrum as CSV");
  std::string sgraph, sop = "adjacency";
  std::uint64_t sseed = 0;
  std::optional<double> stau;
  bool svectors = false, spartition = false;
  spec->add_option("--graph", sgraph, "edge-list path or generator spec")->required();
  spec->add_option("--graph-seed", sseed)->capture_default_str();
  spec->add_option("--operator", sop, "adjacency|symnorm|rowstoch")->capture_default_str();
  spec->add_option("--tau", stau, "spectrum of the centered operator instead");
  spec->add_flag("--vectors", svectors, "append eigenvector entries");
  spec->add_flag("--partition", spartition, "also print WL classes, quotient and split");

  // partition
  auto* part = app.add_subcommand("partition", "Print the coarsest equitable partition");
  std::string pgraph;
  std::uint64_t pseed = 0;
  part->add_option("--graph", pgraph, "edge-list path or generator spec")->required();
  part->add_option("--graph-seed", pseed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) {
      RunConfig cfg;
      if (config_path) cfg = from_json(json::parse(read_file(*config_path)), cfg);
      if (const char* env = std::getenv("OVERSMOOTH_SEED")) {
        try {
          cfg.seeds = {std::stoull(env)};
        } catch (const std::exception&) {
          throw ParseError(std::string("OVERSMOOTH_SEED is not an integer: ") + env);
        }
      }
      if (graph) cfg.graph = *graph;
      if (graph_seed) cfg.graph_seed = *graph_seed;
      if (features) cfg.features = *features;
      if (raw_features) cfg.raw_features = true;
      if (k) cfg.k = *k;
      if (op) cfg.op = parse_operator_kind(*op);
      if (variants) cfg.variants = split_list(*variants);
      if (alpha) cfg.alpha = *alpha;
      if (identity_w2) cfg.identity_w2 = true;
      if (pairnorm_scale) cfg.pairnorm_scale = *pairnorm_scale;
      if (graphnorm_tau) {
        cfg.graphnorm_tau.clear();
        for (const auto& t : split_list(*graphnorm_tau)) cfg.graphnorm_tau.push_back(std::stod(t));
      }
      if (gnv2_k) cfg.gnv2_k = *gnv2_k;
      if (gnv2_gaussian) cfg.gnv2_gaussian_tau = true;
      if (nl) cfg.nonlinearity = parse_nonlinearity(*nl);
      if (weights) cfg.weights = *weights;
      if (weight_mean) cfg.weight_mean = *weight_mean;
      if (weight_std) cfg.weight_std = *weight_std;
      if (eps_floor) cfg.eps_floor = *eps_floor;
      if (steps) cfg.steps = *steps;
      if (seeds) {
        cfg.seeds.clear();
        for (const auto& s : split_list(*seeds)) cfg.seeds.push_back(std::stoull(s));
      }
      if (metrics) cfg.metrics = split_list(*metrics);
      if (reference) cfg.reference = parse_reference_kind(*reference);
      if (ev_width) cfg.ev_width = *ev_width;
      if (top_k) cfg.top_k = *top_k;
      if (rank_tol) cfg.rank_tol = *rank_tol;
      if (output) cfg.output = *output;
      if (jobs) cfg.jobs = *jobs;
      cfg.validate();
      if (dump) {
        out << to_json(cfg).dump(2) << '\n';
        return kOk;
      }
      return cmd_simulate(cfg, err);
    }
    if (*ver) {
      vc.props = split_list(props);
      vc.op = parse_operator_kind(vop);
      return cmd_verify(vc, out, err);
    }
    if (*spec) return cmd_spectrum(sgraph, sseed, parse_operator_kind(sop), stau, svectors,
                                   spartition, out);
    return cmd_partition(pgraph, pseed, out);
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: not a number: " << e.what() << '\n';
  } catch (const std::out_of_range& e) {
    err << "error: value out of range: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kConfigError;
}

}  // namespace oversmooth::cli
