#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oversmooth/graph.hpp"
#include "oversmooth/layers.hpp"
#include "oversmooth/partition.hpp"
#include "oversmooth/spectral.hpp"

namespace oversmooth {

enum class Verdict { Pass, Fail, Inconclusive };

std::string_view to_string(Verdict v);

struct PropReport {
  std::string id;
  Verdict verdict = Verdict::Inconclusive;
  std::size_t trials = 0;
  std::size_t successes = 0;
  /// Theoretical probability, rate or threshold the trials are held to.
  std::optional<double> bound;
  std::vector<double> evidence;
  std::string note;
};

/// Per-step projections ||nu_q^T X^(t)||_2 (row t-1 holds step t) with one
/// fitted log-slope per tracked q.
struct ConvergenceTrace {
  std::vector<Index> qs;
  Matrix projections;
  std::vector<double> slopes;
  /// Rate the leading tracked slope is compared against.
  double target_rate = 0.0;
  double final_topk_distance = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

/// Runs body(i) for i in [0, count) on up to `jobs` threads (0 means
/// hardware concurrency). Results must be written by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t jobs = 0);

/// Least-squares slope of log(values[t]) against t over the final half of
/// the leading run of entries above `floor`. NaN when fewer than 2 points.
double fit_log_slope(const std::vector<double>& values, double floor);

/// Normalized Gaussian features with per-column unit norm.
FeatureMatrix random_features(Index n, Index k, std::uint64_t seed);

struct CheckOptions {
  std::size_t steps = 256;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  WeightSpec weights;
};

/// Residual trajectories keep min_t mu_v(X^(t)) above 1e-6 in >= 90% of
/// trials. SetupError when mu_v(x0) = 0.
PropReport check_prop1_residual_no_collapse(const OperatorMatrix& a, const FeatureMatrix& x0,
                                            const Vector& v, double alpha,
                                            const CheckOptions& opt);

/// epsilon giving probability p in the signal-retention bound.
double prop2_epsilon(double p, double alpha, double s);
/// 1 - exp(-eps^2 / (2 alpha^2 s^2)); 1 when s = 0.
double prop2_probability(double eps, double alpha, double s);

/// Frequency of ||x_0^T X^(steps)|| >= eps against the bound p with a
/// 3-sigma binomial slack. x0 columns must be unit norm.
PropReport check_prop2_signal_retention(const OperatorMatrix& a, const FeatureMatrix& x0,
                                        double alpha, double eps, const CheckOptions& opt);

/// Residual weight schedule steering X^(T) to a target.
struct Prop3Schedule {
  std::size_t T = 0;
  std::vector<Matrix> w1;
  std::vector<Matrix> w2;
  /// Distance from the target to Kr(A, X0).
  double krylov_residual = 0.0;
};

/// alpha = 0.5, T = n, W1^(0) = 0, W1^(t) = I, and W2^(T-i) carrying the
/// coefficients of A^{i-1} X0 scaled by 0.5^{-i}. The target is replaced by
/// its projection onto the Krylov subspace.
Prop3Schedule build_prop3_schedule(const OperatorMatrix& a, const FeatureMatrix& x0,
                                   const FeatureMatrix& y);

/// Runs a schedule through run_trajectory.
FeatureMatrix run_prop3_schedule(const OperatorMatrix& a, const FeatureMatrix& x0,
                                 const Prop3Schedule& s);

/// Forward: y in the Krylov subspace is reached to 1e-6 relative. Converse:
/// the constructed schedule and `random_schedules` Gaussian schedules all
/// stay at least rho - 1e-8 max(1, ||y||) away. Evidence: [rho, ||X^(T) - y|| per run].
PropReport check_prop3_krylov_reachability(const OperatorMatrix& a, const FeatureMatrix& x0,
                                           const FeatureMatrix& y,
                                           std::size_t random_schedules = 8,
                                           std::uint64_t seed = 0);

/// Floor k (v^T 1)^2 / n on mu_v of centered unit-column features.
double prop4_floor(const Vector& v, Index k);

/// BatchNorm trajectories keep mu_v above prop4_floor in every trial.
/// SetupError when v^T 1 <= 0 or rank(V_{!=0}^T x0) < 2.
PropReport check_prop4_bn_no_collapse(const OperatorMatrix& a, const FeatureMatrix& x0,
                                      const Vector& v, const CheckOptions& opt);

/// BatchNorm trajectory tracked on the centered eigenbasis. Pass when the
/// slope for q = k+1 is at most log(|l_{k+1}|/|l_k|) + 0.05 and
/// top_k_dist(X^(steps)) < 1e-6; inconclusive without a gap at k.
ConvergenceTrace check_prop5_topk_convergence(const OperatorMatrix& a, const FeatureMatrix& x0,
                                              std::size_t k, const CheckOptions& opt);

struct Prop6Schedule {
  std::vector<Matrix> weights;
  std::size_t T = 0;
  /// Coefficients nu_l^T X^(k) after elimination (k x k, diagonal up to
  /// rounding) and the largest tail coefficient.
  Matrix sigma_top;
  double sigma_tail_max = 0.0;
};

/// Gauss-Jordan elimination over k BatchNorm steps followed by identity
/// weights until T. SetupError on pivot below 1e-12 relative or a missing
/// gap.
Prop6Schedule build_prop6_schedule(const OperatorMatrix& a, const FeatureMatrix& x0,
                                   std::size_t k, double eps, FeatureMatrix* x_after = nullptr);

/// Evidence: min_i |nu_i^T X^(t)_{:,i}| at t = T..T+extra.
PropReport check_prop6_tightness(const OperatorMatrix& a, const FeatureMatrix& x0,
                                 std::size_t k, double eps, std::size_t extra = 32);

/// Pass iff claim 1 holds, claim 2 holds for non-regular graphs and the
/// trace gap matches tau 2|E|/n when there is an edge.
PropReport check_prop7_centering(const Graph& g, double tau);

/// Vanilla GCN with Gaussian weights (spectral norm capped at 1 when
/// `cap_weights`). Pass when mu_v(X^(steps)) <= 1e-6 mu_v(X^(0)) and the
/// fitted slope of sqrt(mu_v / ||X||_F^2) is negative. target_rate is
/// log|l_2 / l_1|.
ConvergenceTrace check_vanilla_oversmoothing(const Graph& g, const FeatureMatrix& x0,
                                             const CheckOptions& opt, bool cap_weights = true);

}  // namespace oversmooth
