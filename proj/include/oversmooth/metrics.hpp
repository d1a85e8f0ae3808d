#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "oversmooth/graph.hpp"
#include "oversmooth/spectral.hpp"

namespace oversmooth {

struct MetricRecord {
  std::size_t step = 0;
  double mu_v = 0.0;
  double dirichlet = 0.0;
  double d_col = 0.0;
  double d_pcol = 0.0;
  double d_ev = 0.0;
  std::size_t rank = 0;
  double top_k_dist = 0.0;
};

inline constexpr std::string_view kMetricCsvHeader =
    "step,mu_v,dirichlet,d_col,d_pcol,d_ev,rank,top_k_dist";

enum class ReferenceKind { AllOnes, DegreeSqrt, DominantEig, Custom };

std::string_view to_string(ReferenceKind kind);
ReferenceKind parse_reference_kind(std::string_view text);

/// Unit vector spanning the oversmoothing subspace.
class ReferenceVector {
 public:
  /// ContractError unless ||v|| = 1 to 1e-10.
  ReferenceVector(Vector v, ReferenceKind kind = ReferenceKind::Custom);

  static ReferenceVector all_ones(Index n);
  /// D^{1/2} 1 normalized; DomainError for an edgeless graph.
  static ReferenceVector degree_sqrt(const Graph& g);
  /// Leading eigenvector of a symmetric operator (sign-fixed).
  static ReferenceVector dominant(const OperatorMatrix& a);
  static ReferenceVector make(ReferenceKind kind, const Graph& g, const OperatorMatrix& a);

  const Vector& v() const noexcept { return v_; }
  ReferenceKind kind() const noexcept { return kind_; }

 private:
  Vector v_;
  ReferenceKind kind_;
};

/// ||(I - v v^T) X||_F^2.
double mu(const Matrix& x, const Vector& v);
double mu(const Matrix& x, const ReferenceVector& v);

/// (1/2) sum over undirected edges of w_e ||x_u / sqrt(d_u) - x_v / sqrt(d_v)||^2.
/// DomainError for isolated nodes.
double dirichlet(const Graph& g, const Matrix& x);

/// Columns with ||.||_1 below this are treated as zero by col_distance and
/// col_projection_distance.
inline constexpr double kZeroColumnNorm = 1e-12;

/// (1/k^2) sum_{i,j} || x_i/||x_i||_1 - x_j/||x_j||_1 ||_2. A zero column
/// normalizes to the zero vector.
double col_distance(const Matrix& x);
/// (1/k^2) sum_{i,j} 1 - cos(x_i, x_j). Self pairs count 0; a pair with one
/// zero column counts 1.
double col_projection_distance(const Matrix& x);

/// d_ev against the first `width` eigenvectors (all when empty).
double eigenspace_distance(const Matrix& x, const EigenSystem& es,
                           std::optional<std::size_t> width = std::nullopt);

struct EquivalenceReport {
  double mu = 0.0;
  double energy = 0.0;
  /// Tight constants c1 mu <= E <= c2 mu from the quadratic form of E on
  /// the complement of v.
  double c1 = 0.0;
  double c2 = 0.0;
  bool bounds_hold = false;
  /// E <= mu, valid for every non-negative weighting.
  bool unit_upper_bound = false;
  /// E ~ 0 iff mu ~ 0 (both relative to max(1, ||X||_F^2) at 1e-12).
  bool zero_set_equivalent = false;
};

/// v = D^{1/2} 1 normalized. DomainError for disconnected graphs.
EquivalenceReport measure_equivalence_check(const Graph& g, const Matrix& x);

/// Everything needed to fill a MetricRecord.
struct MetricContext {
  const Graph* graph = nullptr;
  Vector v;
  /// Full orthonormal eigenbasis for d_ev.
  Matrix full_basis;
  /// Orthonormal basis for top_k_dist; empty gives 0.
  Matrix topk_basis;
  double rank_tol = 1e-10;

  MetricRecord measure(std::size_t step, const Matrix& x) const;
};

}  // namespace oversmooth
