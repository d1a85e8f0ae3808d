#include "oversmooth/layers.hpp"

#include <cmath>
#include <limits>

#include "oversmooth/errors.hpp"
#include "oversmooth/spectral.hpp"

namespace oversmooth {

std::string_view to_string(Nonlinearity nl) {
  return nl == Nonlinearity::Relu ? "relu" : "identity";
}

Nonlinearity parse_nonlinearity(std::string_view text) {
  if (text == "identity") return Nonlinearity::Identity;
  if (text == "relu") return Nonlinearity::Relu;
  throw ParseError("unknown nonlinearity \"" + std::string(text) + "\" (identity|relu)");
}

double WeightSpec::std_for(Index k) const {
  const double s = std ? *std : 1.0 / std::sqrt(static_cast<double>(std::max<Index>(k, 1)));
  if (!(s >= 0.0)) throw DomainError("weight std must be >= 0");
  return s;
}

Matrix sample_weight(const WeightSpec& spec, Index k, Rng& rng, std::size_t t, bool second) {
  switch (spec.mode) {
    case WeightSpec::Mode::Identity: return Matrix::Identity(k, k);
    case WeightSpec::Mode::Gaussian: return gaussian_matrix(k, k, spec.mean, spec.std_for(k), rng);
    case WeightSpec::Mode::Explicit: {
      const auto& list = second ? spec.w2 : spec.w1;
      if (t >= list.size())
        throw ContractError("explicit weight schedule has no entry for step " + std::to_string(t));
      if (list[t].rows() != k || list[t].cols() != k)
        throw ContractError("explicit weight for step " + std::to_string(t) + " is not " +
                            std::to_string(k) + "x" + std::to_string(k));
      return list[t];
    }
  }
  return Matrix();
}

std::string variant_name(const LayerVariant& v) {
  struct Name {
    std::string operator()(const layer::Vanilla&) const { return "vanilla"; }
    std::string operator()(const layer::Residual&) const { return "residual"; }
    std::string operator()(const layer::BatchNorm&) const { return "batchnorm"; }
    std::string operator()(const layer::PairNorm&) const { return "pairnorm"; }
    std::string operator()(const layer::GraphNorm&) const { return "graphnorm"; }
    std::string operator()(const layer::GraphNormV2&) const { return "graphnormv2"; }
    std::string operator()(const layer::PowerEmbed&) const { return "powerembed"; }
  };
  return std::visit(Name{}, v);
}

void LayerConfig::validate(Index n) const {
  if (const auto* r = std::get_if<layer::Residual>(&variant))
    if (!(r->alpha > 0.0 && r->alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (const auto* g = std::get_if<layer::GraphNormV2>(&variant))
    if (static_cast<Index>(g->k) > n - 1) throw DomainError("GraphNormv2 needs k <= n-1");
  if (const auto* p = std::get_if<layer::PairNorm>(&variant))
    if (!(p->scale > 0.0)) throw DomainError("PairNorm scale must be positive");
  if (weights.mode == WeightSpec::Mode::Gaussian && weights.std && !(*weights.std >= 0.0))
    throw DomainError("weight std must be >= 0");
}

NormContext NormContext::from_basis(Matrix vkplus) {
  require_orthonormal(vkplus);
  NormContext ctx;
  ctx.vkplus = std::move(vkplus);
  return ctx;
}

NormContext NormContext::from_operator(const OperatorMatrix& a, std::size_t k) {
  const Index n = a.size();
  if (static_cast<Index>(k) > n - 1) throw DomainError("GraphNormv2 needs k <= n-1");
  const auto es = symmetric_eig(a);
  const Matrix vk = top_k(es, k);
  const Vector ones = Vector::Ones(n);
  Vector r = ones - vk * (vk.transpose() * ones);
  const double rn = r.norm();
  Matrix v(n, static_cast<Index>(k) + 1);
  v.leftCols(static_cast<Index>(k)) = vk;
  if (rn > 1e-10 * std::sqrt(static_cast<double>(n))) {
    v.col(static_cast<Index>(k)) = r / rn;
  } else {
    v.col(static_cast<Index>(k)) = es.vectors.col(static_cast<Index>(k));
  }
  return from_basis(std::move(v));
}

Vector NormContext::ones_coordinates() const {
  const Index n = vkplus.rows();
  return vkplus.transpose() * Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

FeatureMatrix apply_nonlinearity(FeatureMatrix x, Nonlinearity nl) {
  if (nl == Nonlinearity::Relu) x = x.cwiseMax(0.0);
  return x;
}

FeatureMatrix step_vanilla(const OperatorMatrix& a, const FeatureMatrix& x, const Matrix& w,
                           Nonlinearity nl) {
  if (x.rows() != a.size() || w.rows() != x.cols())
    throw ContractError("step_vanilla: shape mismatch");
  return apply_nonlinearity(a.data() * x * w, nl);
}

FeatureMatrix step_residual(const OperatorMatrix& a, const FeatureMatrix& x,
                            const FeatureMatrix& x0, const Matrix& w1, const Matrix& w2,
                            double alpha, Nonlinearity nl) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (x.rows() != a.size() || x0.rows() != x.rows() || x0.cols() != x.cols() ||
      w1.rows() != x.cols() || w2.rows() != x0.cols() || w1.cols() != w2.cols())
    throw ContractError("step_residual: shape mismatch");
  return apply_nonlinearity((1.0 - alpha) * (a.data() * x * w1) + alpha * (x0 * w2), nl);
}

namespace {
// `scale` is the magnitude before centering; anything within roundoff of it
// counts as zero.
double denominator(double sigma, Index col, std::optional<double> eps_floor, double scale = 0.0) {
  if (eps_floor) return std::max(sigma, *eps_floor);
  constexpr double kRoundoff = 64 * std::numeric_limits<double>::epsilon();
  if (!(sigma > kRoundoff * scale) || !std::isfinite(sigma))
    throw DegenerateColumnError(static_cast<std::size_t>(col), "zero after centering");
  return sigma;
}

double entry_or(const Vector& v, Index j, double fallback) {
  return v.size() > j ? v(j) : fallback;
}
}  // namespace

FeatureMatrix batch_norm(const FeatureMatrix& x, std::optional<double> eps_floor) {
  FeatureMatrix out = x.rowwise() - x.colwise().mean();
  for (Index j = 0; j < out.cols(); ++j)
    out.col(j) /= denominator(out.col(j).norm(), j, eps_floor, x.col(j).norm());
  return out;
}

FeatureMatrix step_batchnorm(const OperatorMatrix& a, const FeatureMatrix& x, const Matrix& w,
                             Nonlinearity nl, std::optional<double> eps_floor) {
  return batch_norm(step_vanilla(a, x, w, nl), eps_floor);
}

FeatureMatrix graph_norm(const FeatureMatrix& x, const Vector& tau, const Vector& gamma,
                         const Vector& beta, std::optional<double> eps_floor) {
  const Index n = x.rows();
  FeatureMatrix out(n, x.cols());
  const double rn = std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < x.cols(); ++j) {
    const double t = entry_or(tau, j, 1.0);
    const Vector c = x.col(j).array() - t * x.col(j).mean();
    const double sigma = denominator(c.norm() / rn, j, eps_floor, x.col(j).norm() / rn);
    out.col(j) = (entry_or(gamma, j, 1.0) / sigma) * c.array() + entry_or(beta, j, 0.0);
  }
  return out;
}

FeatureMatrix graph_norm_v2(const FeatureMatrix& x, const NormContext& ctx, const Matrix& tau,
                            std::optional<double> eps_floor) {
  const Index n = x.rows();
  if (ctx.vkplus.rows() != n) throw ContractError("graph_norm_v2: basis size mismatch");
  if (tau.rows() != ctx.vkplus.cols() || tau.cols() != x.cols())
    throw ContractError("graph_norm_v2: tau must be (k+1) x d");
  FeatureMatrix out(n, x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const Vector u = ctx.vkplus * tau.col(j);
    const Vector c = x.col(j) - u * u.dot(x.col(j));
    const double sigma = denominator(c.norm(), j, eps_floor, x.col(j).norm());
    out.col(j) = (entry_or(ctx.gamma, j, 1.0) / sigma) * c.array() + entry_or(ctx.beta, j, 0.0);
  }
  return out;
}

FeatureMatrix pair_norm(const FeatureMatrix& x, double s, std::optional<double> eps_floor) {
  FeatureMatrix c = x.rowwise() - x.colwise().mean();
  const double fro = denominator(c.norm(), 0, eps_floor, x.norm());
  return (s * std::sqrt(static_cast<double>(x.rows())) / fro) * c;
}

FeatureMatrix power_embed_step(const OperatorMatrix& a, const FeatureMatrix& x, const Matrix& w,
                               Nonlinearity nl, std::optional<double> eps_floor) {
  FeatureMatrix y = step_vanilla(a, x, w, nl);
  for (Index j = 0; j < y.cols(); ++j) y.col(j) /= denominator(y.col(j).norm(), j, eps_floor);
  return y;
}

namespace {

struct Stepper {
  const OperatorMatrix& a;
  const FeatureMatrix& x0;
  const LayerConfig& cfg;
  Rng& rng;
  NormContext v2ctx;
  Matrix v2tau;

  FeatureMatrix step(const FeatureMatrix& x, std::size_t t) {
    const Index k = x.cols();
    const auto& ws = cfg.weights;
    const auto nl = cfg.nonlinearity;
    return std::visit(
        [&](const auto& v) -> FeatureMatrix {
          using T = std::decay_t<decltype(v)>;
          const Matrix w = sample_weight(ws, k, rng, t);
          if constexpr (std::is_same_v<T, layer::Residual>) {
            const Matrix w2 = v.identity_w2 ? Matrix::Identity(k, k)
                                            : sample_weight(ws, k, rng, t, true);
            return step_residual(a, x, x0, w, w2, v.alpha, nl);
          } else if constexpr (std::is_same_v<T, layer::Vanilla>) {
            return step_vanilla(a, x, w, nl);
          } else if constexpr (std::is_same_v<T, layer::BatchNorm>) {
            return step_batchnorm(a, x, w, nl, cfg.eps_floor);
          } else if constexpr (std::is_same_v<T, layer::PairNorm>) {
            return pair_norm(step_vanilla(a, x, w, nl), v.scale, cfg.eps_floor);
          } else if constexpr (std::is_same_v<T, layer::GraphNorm>) {
            return graph_norm(step_vanilla(a, x, w, nl), v.tau, cfg.gamma, cfg.beta, cfg.eps_floor);
          } else if constexpr (std::is_same_v<T, layer::GraphNormV2>) {
            return graph_norm_v2(step_vanilla(a, x, w, nl), v2ctx, v2tau, cfg.eps_floor);
          } else {
            return power_embed_step(a, x, w, nl, cfg.eps_floor);
          }
        },
        cfg.variant);
  }
};

}  // namespace

TrajectoryLog run_trajectory(const OperatorMatrix& a, const FeatureMatrix& x0,
                             const LayerConfig& cfg, std::size_t steps, Rng& rng,
                             const MetricContext* metrics, const std::vector<Observer>& observers) {
  if (steps < 1) throw DomainError("steps must be >= 1");
  if (x0.rows() != a.size()) throw ContractError("run_trajectory: x0 rows differ from operator size");
  cfg.validate(a.size());
  Stepper st{a, x0, cfg, rng, {}, {}};
  if (const auto* v2 = std::get_if<layer::GraphNormV2>(&cfg.variant)) {
    st.v2ctx = NormContext::from_operator(a, v2->k);
    st.v2ctx.gamma = cfg.gamma;
    st.v2ctx.beta = cfg.beta;
    const Index d = x0.cols();
    if (v2->tau.size() > 0) {
      st.v2tau = v2->tau;
    } else if (v2->gaussian_tau) {
      st.v2tau = gaussian_matrix(st.v2ctx.vkplus.cols(), d, 0.0, 1.0, rng);
      for (Index j = 0; j < d; ++j) st.v2tau.col(j).normalize();
    } else {
      st.v2tau = st.v2ctx.ones_coordinates().replicate(1, d);
    }
  }

  TrajectoryLog log;
  FeatureMatrix x = x0;
  for (std::size_t t = 0; t < steps; ++t) {
    FeatureMatrix next;
    try {
      next = st.step(x, t);
    } catch (const DegenerateColumnError& e) {
      log.abort = AbortInfo{t + 1, e.what()};
      break;
    }
    if (!next.allFinite()) {
      log.abort = AbortInfo{t + 1, "non-finite features"};
      break;
    }
    x = std::move(next);
    log.steps_done = t + 1;
    if (metrics) log.records.push_back(metrics->measure(t + 1, x));
    for (const auto& obs : observers) obs(t + 1, x);
  }
  log.final_features = std::move(x);
  return log;
}

}  // namespace oversmooth
