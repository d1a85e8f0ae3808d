#pragma once

#include <cstddef>
#include <vector>

#include "oversmooth/graph.hpp"
#include "oversmooth/spectral.hpp"

namespace oversmooth {

/// Node partition with canonical class ids (assigned by first occurrence).
struct EquitablePartition {
  std::vector<std::size_t> colors;
  std::size_t m = 0;

  /// Relabels arbitrary colors canonically.
  static EquitablePartition from_colors(const std::vector<std::size_t>& colors);

  /// n x m 0/1 matrix H.
  Matrix indicator() const;
  std::vector<std::size_t> class_sizes() const;
};

/// One color-refinement round: each node's new color is determined by its old
/// color and the multiset of (neighbor color, quantized edge weight).
EquitablePartition wl_round(const Graph& g, const EquitablePartition& ep);

/// Coarsest equitable partition reached from the constant coloring.
EquitablePartition wl_refine(const Graph& g);

struct QuotientGraph {
  Matrix a_pi;
  std::vector<std::size_t> class_sizes;
};

/// A^pi = (H^T H)^{-1} H^T A H; ContractError "partition not equitable" when
/// A H differs from H A^pi by more than 1e-9.
QuotientGraph quotient(const Matrix& a, const EquitablePartition& ep);
QuotientGraph quotient(const Graph& g, const EquitablePartition& ep);

/// Eigenpairs of A^pi and their lifts H nu^pi (unit norm).
struct QuotientSpectrum {
  Vector values;
  Matrix vectors_pi;
  Matrix lifted;
};

/// Requires a symmetric source so that A^pi is similar to the symmetric
/// D^{-1/2} H^T A H D^{-1/2}, D = H^T H.
QuotientSpectrum quotient_eig(const Matrix& a, const EquitablePartition& ep);

struct EigenpairSplit {
  std::vector<Index> structural;
  std::vector<Index> rest;
  /// es.vectors after rotating each eigenvalue cluster so that directions
  /// inside col(H) come first.
  Matrix vectors;
};

/// Index i is structural iff ||(I - H (H^T H)^{-1} H^T) v_i|| <= 1e-8 after
/// the cluster rotation (clusters: |lambda_i - lambda_j| < 1e-8).
EigenpairSplit split_eigenpairs(const EigenSystem& es, const EquitablePartition& ep);

struct CenteringReport {
  double tau = 0.0;
  bool regular = false;
  std::size_t rest_count = 0;
  /// max over rest eigenpairs of ||(I - tau P) A v - lambda v||.
  double claim1_max_residual = 0.0;
  bool claim1 = false;
  /// ||C v - rho v|| for the dominant eigenvector v of A, rho its Rayleigh
  /// quotient under C = (I - tau P) A.
  double claim2_residual = 0.0;
  bool claim2_applicable = false;
  bool claim2 = false;
  /// Tr(A) - Tr(C), and the closed form tau * 1^T A 1 / n.
  double trace_gap = 0.0;
  double trace_gap_expected = 0.0;
  bool claim3_applicable = false;
  bool claim3 = false;
};

/// Runs on the adjacency operator of g.
CenteringReport check_centering_effect(const Graph& g, double tau);
/// Runs on any symmetric operator for which ep is equitable.
CenteringReport check_centering_effect(const OperatorMatrix& a, const EquitablePartition& ep,
                                       double tau);

}  // namespace oversmooth
