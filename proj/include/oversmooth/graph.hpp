#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oversmooth/types.hpp"

namespace oversmooth {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Symmetric, non-negative weighted graph with optional node features.
///
/// Edges are stored once per unordered pair with u <= v, sorted
/// lexicographically. Self-loops are allowed and stored once.
class Graph {
 public:
  Graph() = default;

  /// Validates indices and weights and canonicalizes the edge list.
  /// Repeated pairs (in either orientation) collapse into one entry; a repeat
  /// with a different weight is a DomainError.
  Graph(std::size_t n, std::vector<Edge> edges,
        std::optional<FeatureMatrix> features = std::nullopt);

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::optional<FeatureMatrix>& features() const noexcept { return features_; }

  Graph with_features(FeatureMatrix features) const;

  /// Dense A_adj.
  Matrix adjacency() const;
  /// Weighted degrees, A_adj 1.
  Vector degrees() const;
  /// Neighbor lists as (node, weight); a self-loop lists the node itself.
  std::vector<std::vector<std::pair<std::size_t, double>>> neighbors() const;

  bool is_connected() const;
  bool is_regular(double tol = 1e-12) const;
  /// Connected component label per node, labels in order of first node.
  std::vector<std::size_t> components() const;
  /// Induced subgraph on the largest component (ties: lowest label), nodes
  /// relabeled in increasing original order; features sliced along.
  Graph largest_component() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::optional<FeatureMatrix> features_;
};

/// Edge list: one "u v" or "u v w" per line, 0-indexed, '#' comments.
/// Directed input is symmetrized.
Graph parse_edge_list(std::istream& in);
Graph parse_edge_list(std::string_view text);

/// n rows of comma-separated reals with equal length.
FeatureMatrix parse_feature_csv(std::istream& in, std::size_t n);
FeatureMatrix parse_feature_csv(std::string_view text, std::size_t n);

/// Scales every nonzero column to unit 2-norm; zero columns are left as is.
FeatureMatrix normalize_columns(FeatureMatrix x);

namespace gen {
struct ErdosRenyi {
  std::size_t n = 0;
  double p = 0.0;
};
struct Sbm {
  std::vector<std::size_t> block_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
};
struct Path {
  std::size_t n = 0;
};
struct Star {
  std::size_t n = 0;
};
struct Cycle {
  std::size_t n = 0;
};
/// Circulant d-regular graph: i ~ i±1..i±d/2, plus i ~ i+n/2 when d is odd.
struct CompleteRegular {
  std::size_t n = 0;
  std::size_t d = 0;
};
}  // namespace gen

struct GeneratorSpec {
  std::variant<gen::ErdosRenyi, gen::Sbm, gen::Path, gen::Star, gen::Cycle,
               gen::CompleteRegular>
      shape;
  bool largest_component = false;
};

/// Deterministic given (spec, seed). Random shapes draw one uniform per
/// candidate pair (i < j, row-major) from Rng seeded with `seed`.
Graph gen_graph(const GeneratorSpec& spec, std::uint64_t seed);

/// Mini-language: "er:n,p", "sbm:n1+n2+...,pin,pout", "path:n", "star:n",
/// "cycle:n", "regular:n,d"; a trailing "/lcc" keeps the largest component.
GeneratorSpec parse_generator_spec(std::string_view text);
std::string to_string(const GeneratorSpec& spec);

enum class OperatorKind { Adjacency, SymNormalized, RowStochastic, Centered };

std::string_view to_string(OperatorKind kind);
OperatorKind parse_operator_kind(std::string_view text);

/// Dense n x n message-passing operator.
class OperatorMatrix {
 public:
  /// Validates the invariants of `kind` against `data`. The symmetric flag
  /// is computed (transpose equality to 1e-12).
  OperatorMatrix(Matrix data, OperatorKind kind, double tau = 0.0);

  const Matrix& data() const noexcept { return data_; }
  OperatorKind kind() const noexcept { return kind_; }
  /// Centering strength; only meaningful for OperatorKind::Centered.
  double tau() const noexcept { return tau_; }
  bool symmetric() const noexcept { return symmetric_; }
  Index size() const noexcept { return data_.rows(); }

  /// Largest |eigenvalue|; computed on demand.
  double spectral_radius() const;

 private:
  Matrix data_;
  OperatorKind kind_;
  double tau_ = 0.0;
  bool symmetric_ = false;
};

/// Adjacency, D^{-1/2} A D^{-1/2}, or D^{-1} A. Centered is rejected here;
/// use center_operator.
OperatorMatrix build_operator(const Graph& g, OperatorKind kind);

/// (I - tau 11^T / n) a.
OperatorMatrix center_operator(const OperatorMatrix& a, double tau);

}  // namespace oversmooth
