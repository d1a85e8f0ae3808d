#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oversmooth/graph.hpp"
#include "oversmooth/metrics.hpp"
#include "oversmooth/types.hpp"

namespace oversmooth {

enum class Nonlinearity { Identity, Relu };

std::string_view to_string(Nonlinearity nl);
Nonlinearity parse_nonlinearity(std::string_view text);

/// How W^(t) (and W_1, W_2 for residual layers) are drawn.
struct WeightSpec {
  enum class Mode { Gaussian, Identity, Explicit };
  Mode mode = Mode::Gaussian;
  double mean = 0.0;
  /// Standard deviation; unset means 1/sqrt(k).
  std::optional<double> std;
  /// Explicit mode: W^(t) (or W_1^(t)) at index t, and W_2^(t) for residual.
  std::vector<Matrix> w1;
  std::vector<Matrix> w2;

  double std_for(Index k) const;
};

/// k x k weight for step `t`. Gaussian draws consume `rng`; Identity returns
/// I_k; Explicit returns `list[t]` (ContractError when out of range or of
/// the wrong shape).
Matrix sample_weight(const WeightSpec& spec, Index k, Rng& rng, std::size_t t = 0,
                     bool second = false);

namespace layer {
struct Vanilla {};
struct Residual {
  double alpha = 0.2;
  /// W_2 = I instead of a Gaussian draw.
  bool identity_w2 = false;
};
struct BatchNorm {};
struct PairNorm {
  double scale = 1.0;
};
struct GraphNorm {
  /// Per-column centering strength; empty means all ones.
  Vector tau;
};
struct GraphNormV2 {
  /// Number of operator eigenvectors in V_{k+}.
  std::size_t k = 1;
  /// (k+1) x d, one column per feature column. Empty selects the
  /// BatchNorm-emulating coordinates of 1/sqrt(n), or Gaussian draws (each
  /// column scaled to unit norm) when gaussian_tau is set.
  Matrix tau;
  bool gaussian_tau = false;
};
struct PowerEmbed {};
}  // namespace layer

using LayerVariant = std::variant<layer::Vanilla, layer::Residual, layer::BatchNorm,
                                  layer::PairNorm, layer::GraphNorm, layer::GraphNormV2,
                                  layer::PowerEmbed>;

std::string variant_name(const LayerVariant& v);

struct LayerConfig {
  LayerVariant variant = layer::Vanilla{};
  Nonlinearity nonlinearity = Nonlinearity::Identity;
  WeightSpec weights;
  /// Affine parameters of the normalization layers; empty means 1 and 0.
  Vector gamma;
  Vector beta;
  /// Optional denominator floor for normalizations (off when unset).
  std::optional<double> eps_floor;

  /// DomainError when alpha is outside (0,1) or k_eig >= n.
  void validate(Index n) const;
};

/// V_{k+} = [V_k | r/||r||] with r = 1 - V_k V_k^T 1, plus affine parameters.
struct NormContext {
  Matrix vkplus;
  Vector gamma;
  Vector beta;

  /// V_k from the top-k eigenvectors of `a`. When 1 already lies in span(V_k)
  /// the extra column is the next eigenvector instead.
  static NormContext from_operator(const OperatorMatrix& a, std::size_t k);
  /// Validates orthonormality to 1e-8.
  static NormContext from_basis(Matrix vkplus);

  /// Coordinates of 1/sqrt(n) in the V_{k+} basis.
  Vector ones_coordinates() const;
};

FeatureMatrix apply_nonlinearity(FeatureMatrix x, Nonlinearity nl);

/// sigma(A X W).
FeatureMatrix step_vanilla(const OperatorMatrix& a, const FeatureMatrix& x, const Matrix& w,
                           Nonlinearity nl);

/// sigma((1 - alpha) A X W1 + alpha X0 W2).
FeatureMatrix step_residual(const OperatorMatrix& a, const FeatureMatrix& x,
                            const FeatureMatrix& x0, const Matrix& w1, const Matrix& w2,
                            double alpha, Nonlinearity nl);

/// Center each column and divide by its 2-norm. DegenerateColumnError when a
/// centered column is zero (or below the floor when eps_floor is set).
FeatureMatrix batch_norm(const FeatureMatrix& x, std::optional<double> eps_floor = std::nullopt);

FeatureMatrix step_batchnorm(const OperatorMatrix& a, const FeatureMatrix& x, const Matrix& w,
                             Nonlinearity nl, std::optional<double> eps_floor = std::nullopt);

/// gamma_j (x_j - tau_j mean(x_j)) / sigma_j + beta_j with
/// sigma_j = ||x_j - tau_j mean(x_j)||_2 / sqrt(n).
FeatureMatrix graph_norm(const FeatureMatrix& x, const Vector& tau, const Vector& gamma,
                         const Vector& beta, std::optional<double> eps_floor = std::nullopt);

/// gamma_j (x_j - V t_j t_j^T V^T x_j) / sigma_j + beta_j with
/// sigma_j = ||x_j - V t_j t_j^T V^T x_j||_2, t_j = tau.col(j), V = V_{k+}.
FeatureMatrix graph_norm_v2(const FeatureMatrix& x, const NormContext& ctx, const Matrix& tau,
                            std::optional<double> eps_floor = std::nullopt);

/// Center columns, then scale to ||X||_F = s sqrt(n).
FeatureMatrix pair_norm(const FeatureMatrix& x, double s,
                        std::optional<double> eps_floor = std::nullopt);

/// step_vanilla followed by per-column 2-norm normalization.
FeatureMatrix power_embed_step(const OperatorMatrix& a, const FeatureMatrix& x, const Matrix& w,
                               Nonlinearity nl, std::optional<double> eps_floor = std::nullopt);

struct AbortInfo {
  std::size_t step = 0;
  std::string reason;
};

/// Metric records for steps 1..N (fewer when aborted) and the last finite
/// features.
struct TrajectoryLog {
  std::vector<MetricRecord> records;
  FeatureMatrix final_features;
  std::size_t steps_done = 0;
  std::optional<AbortInfo> abort;
};

using Observer = std::function<void(std::size_t step, const FeatureMatrix& x)>;

/// Applies the configured layer `steps` times. After every step the metric
/// context (when given) appends a record and each observer sees X^(t).
/// Degenerate columns and non-finite features stop the run and are recorded
/// in `abort`.
TrajectoryLog run_trajectory(const OperatorMatrix& a, const FeatureMatrix& x0,
                             const LayerConfig& cfg, std::size_t steps, Rng& rng,
                             const MetricContext* metrics = nullptr,
                             const std::vector<Observer>& observers = {});

}  // namespace oversmooth
