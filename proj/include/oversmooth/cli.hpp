#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "oversmooth/graph.hpp"
#include "oversmooth/layers.hpp"
#include "oversmooth/metrics.hpp"
#include "oversmooth/propcheck.hpp"

namespace oversmooth::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kAborted = 2, kVerifyFailed = 3 };

/// Everything `simulate` needs. Keys of the JSON form match the field names.
struct RunConfig {
  /// Edge-list path, or a generator spec when no such file exists.
  std::string graph = "er:200,0.05/lcc";
  std::uint64_t graph_seed = 0;
  /// Feature CSV; unset draws Gaussian features per seed.
  std::optional<std::string> features;
  bool raw_features = false;
  Index k = 32;
  OperatorKind op = OperatorKind::SymNormalized;
  std::vector<std::string> variants{"vanilla"};
  double alpha = 0.2;
  bool identity_w2 = false;
  double pairnorm_scale = 1.0;
  std::vector<double> graphnorm_tau;
  std::size_t gnv2_k = 1;
  bool gnv2_gaussian_tau = false;
  Nonlinearity nonlinearity = Nonlinearity::Identity;
  std::string weights = "gaussian";
  double weight_mean = 0.0;
  std::optional<double> weight_std;
  std::optional<double> eps_floor;
  std::size_t steps = 256;
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::string> metrics{"mu_v", "dirichlet", "d_col", "d_pcol",
                                   "d_ev", "rank", "top_k_dist"};
  ReferenceKind reference = ReferenceKind::DominantEig;
  /// Leading eigenvectors of the operator used by d_ev; 0 means all.
  std::size_t ev_width = 1;
  /// Width of the centered basis behind top_k_dist; 0 leaves it out.
  std::size_t top_k = 4;
  double rank_tol = 1e-10;
  std::string output = "out";
  std::size_t jobs = 0;

  bool operator==(const RunConfig&) const = default;

  /// Throws ParseError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Keys missing from `j` keep the values already in `base`; unknown keys are
/// rejected.
RunConfig from_json(const nlohmann::json& j, RunConfig base = {});

struct VerifyConfig {
  std::vector<std::string> props{"1", "2", "3", "4", "5", "6", "7", "vanilla"};
  std::string graph = "er:100,0.1";
  std::uint64_t graph_seed = 0;
  std::uint64_t seed = 0;
  OperatorKind op = OperatorKind::SymNormalized;
  std::size_t trials = 50;
  std::size_t steps = 256;
  Index k = 8;
  double alpha = 0.2;
  /// Target probability for the signal-retention check.
  double p = 0.9;
  double eps = 0.01;
  double tau = 1.0;
  std::optional<std::string> output;
  std::size_t jobs = 0;
};

/// Loads an edge list when `source` names a file, else generates.
Graph load_graph(const std::string& source, std::uint64_t seed);

LayerConfig layer_config(const RunConfig& cfg, const std::string& variant);

/// Seed-dependent initial features for a run.
FeatureMatrix initial_features(const RunConfig& cfg, const Graph& g, std::uint64_t seed);

nlohmann::json report_json(const PropReport& r);
nlohmann::json trace_json(const std::string& id, const ConvergenceTrace& t);

std::string format_real(double x);
std::string csv_row(const MetricRecord& r, const std::vector<std::string>& metrics);

int cmd_simulate(const RunConfig& cfg, std::ostream& err);
int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_spectrum(const std::string& graph, std::uint64_t graph_seed, OperatorKind op,
                 std::optional<double> tau, bool vectors, bool partition, std::ostream& out);
int cmd_partition(const std::string& graph, std::uint64_t graph_seed, std::ostream& out);

/// Full command-line entry point.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace oversmooth::cli
