#include "oversmooth/propcheck.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "oversmooth/errors.hpp"
#include "oversmooth/metrics.hpp"

namespace oversmooth {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double fit_log_slope(const std::vector<double>& values, double floor) {
  std::size_t m = 0;
  while (m < values.size() && values[m] > floor && std::isfinite(values[m])) ++m;
  std::size_t lo = m / 2;
  if (m - lo < 2) lo = 0;
  if (m - lo < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double c = static_cast<double>(m - lo);
  for (std::size_t i = lo; i < m; ++i) {
    const double x = static_cast<double>(i + 1), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

FeatureMatrix random_features(Index n, Index k, std::uint64_t seed) {
  Rng rng(seed);
  return normalize_columns(gaussian_matrix(n, k, 0.0, 1.0, rng));
}

namespace {

Verdict majority(std::size_t successes, std::size_t trials, double fraction) {
  if (trials == 0) return Verdict::Inconclusive;
  return static_cast<double>(successes) >= fraction * static_cast<double>(trials) ? Verdict::Pass
                                                                                  : Verdict::Fail;
}

double weight_std(const WeightSpec& w, Index k) {
  return w.mode == WeightSpec::Mode::Gaussian ? w.std_for(k) : 0.0;
}

// Indices of the centered eigenpairs inside 1-perp, in spectral order.
std::vector<Index> perp_indices(const EigenSystem& ce) {
  std::vector<Index> idx;
  for (Index i = 0; i < ce.size(); ++i)
    if (!ce.kernel_index || *ce.kernel_index != i) idx.push_back(i);
  return idx;
}

Matrix gather(const Matrix& vectors, const std::vector<Index>& idx, std::size_t from,
              std::size_t to) {
  Matrix out(vectors.rows(), static_cast<Index>(to - from));
  for (std::size_t i = from; i < to; ++i) out.col(static_cast<Index>(i - from)) = vectors.col(idx[i]);
  return out;
}

bool has_gap(double upper, double lower) {
  return std::abs(upper) - std::abs(lower) > 1e-10 * std::max(1.0, std::abs(upper));
}

}  // namespace

PropReport check_prop1_residual_no_collapse(const OperatorMatrix& a, const FeatureMatrix& x0,
                                            const Vector& v, double alpha,
                                            const CheckOptions& opt) {
  const double mu0 = mu(x0, v);
  if (mu0 <= 1e-12 * std::max(1.0, x0.squaredNorm()))
    throw SetupError("mu_v(X0) = 0: features already lie in span(v)");
  constexpr double c_star = 1e-6;
  PropReport rep;
  rep.id = "1";
  rep.trials = opt.trials;
  rep.bound = c_star;
  rep.evidence.assign(opt.trials, 0.0);
  LayerConfig cfg;
  cfg.variant = layer::Residual{alpha};
  cfg.weights = opt.weights;
  parallel_for(
      opt.trials,
      [&](std::size_t t) {
        Rng rng(derive_seed(opt.seed, t));
        double lowest = std::numeric_limits<double>::infinity();
        std::vector<Observer> obs{
            [&](std::size_t, const FeatureMatrix& x) { lowest = std::min(lowest, mu(x, v)); }};
        const auto log = run_trajectory(a, x0, cfg, opt.steps, rng, nullptr, obs);
        rep.evidence[t] = log.abort ? 0.0 : lowest;
      },
      opt.jobs);
  rep.successes = static_cast<std::size_t>(
      std::count_if(rep.evidence.begin(), rep.evidence.end(), [](double m) { return m >= c_star; }));
  rep.verdict = majority(rep.successes, rep.trials, 0.9);
  rep.note = "min_t mu_v per trial; pass at >= 90% of trials above 1e-6";
  return rep;
}

double prop2_epsilon(double p, double alpha, double s) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1)");
  return alpha * s * std::sqrt(2.0 * std::log(1.0 / (1.0 - p)));
}

double prop2_probability(double eps, double alpha, double s) {
  if (s == 0.0) return 1.0;
  return 1.0 - std::exp(-eps * eps / (2.0 * alpha * alpha * s * s));
}

PropReport check_prop2_signal_retention(const OperatorMatrix& a, const FeatureMatrix& x0,
                                        double alpha, double eps, const CheckOptions& opt) {
  for (Index j = 0; j < x0.cols(); ++j)
    if (std::abs(x0.col(j).norm() - 1.0) > 1e-10)
      throw SetupError("column " + std::to_string(j) + " of X0 is not unit norm");
  if (x0.cols() == 0) throw SetupError("X0 has no columns");
  const double s = weight_std(opt.weights, x0.cols());
  const double p = prop2_probability(eps, alpha, s);
  PropReport rep;
  rep.id = "2";
  rep.trials = opt.trials;
  rep.bound = p;
  rep.evidence.assign(opt.trials, 0.0);
  LayerConfig cfg;
  cfg.variant = layer::Residual{alpha};
  cfg.weights = opt.weights;
  const Vector xi = x0.col(0);
  parallel_for(
      opt.trials,
      [&](std::size_t t) {
        Rng rng(derive_seed(opt.seed, t));
        const auto log = run_trajectory(a, x0, cfg, opt.steps, rng);
        rep.evidence[t] = log.abort ? 0.0 : (xi.transpose() * log.final_features).norm();
      },
      opt.jobs);
  rep.successes = static_cast<std::size_t>(
      std::count_if(rep.evidence.begin(), rep.evidence.end(), [&](double e) { return e >= eps; }));
  if (opt.trials == 0) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "no trials";
    return rep;
  }
  const double n = static_cast<double>(opt.trials);
  const double freq = static_cast<double>(rep.successes) / n;
  const double slack = 3.0 * std::sqrt(p * (1.0 - p) / n);
  rep.verdict = freq >= p - slack ? Verdict::Pass : Verdict::Fail;
  rep.note = "||x_0^T X^(t)|| per trial against eps";
  return rep;
}

Prop3Schedule build_prop3_schedule(const OperatorMatrix& a, const FeatureMatrix& x0,
                                   const FeatureMatrix& y) {
  const Index n = a.size(), k = x0.cols();
  if (x0.rows() != n || y.rows() != n || y.cols() != k)
    throw ContractError("prop3: X0 and Y must both be n x k");
  const auto kb = krylov_basis(a, x0);
  Prop3Schedule s;
  s.T = static_cast<std::size_t>(n);
  s.w1.assign(s.T, Matrix::Identity(k, k));
  s.w1[0] = Matrix::Zero(k, k);
  s.w2.assign(s.T, Matrix::Zero(k, k));
  s.krylov_residual = (y - kb.basis * (kb.basis.transpose() * y)).norm();
  for (Index j = 0; j < k; ++j) {
    const Vector w = kb.expand(y.col(j));
    for (std::size_t g = 0; g < kb.kept.size(); ++g) {
      const auto i = static_cast<std::size_t>(kb.kept[g].power) + 1;
      s.w2[s.T - i](kb.kept[g].column, j) = w(static_cast<Index>(g)) / std::pow(0.5, static_cast<double>(i));
    }
  }
  return s;
}

FeatureMatrix run_prop3_schedule(const OperatorMatrix& a, const FeatureMatrix& x0,
                                 const Prop3Schedule& s) {
  LayerConfig cfg;
  cfg.variant = layer::Residual{0.5};
  cfg.weights.mode = WeightSpec::Mode::Explicit;
  cfg.weights.w1 = s.w1;
  cfg.weights.w2 = s.w2;
  Rng rng(0);
  const auto log = run_trajectory(a, x0, cfg, s.T, rng);
  if (log.abort) throw Error("prop3 schedule aborted: " + log.abort->reason);
  return log.final_features;
}

PropReport check_prop3_krylov_reachability(const OperatorMatrix& a, const FeatureMatrix& x0,
                                           const FeatureMatrix& y, std::size_t random_schedules,
                                           std::uint64_t seed) {
  PropReport rep;
  rep.id = "3";
  const auto sched = build_prop3_schedule(a, x0, y);
  const double ynorm = y.norm();
  const double rho = sched.krylov_residual;
  rep.evidence.push_back(rho);
  const FeatureMatrix reached = run_prop3_schedule(a, x0, sched);
  const double dist = (reached - y).norm();
  rep.evidence.push_back(dist);
  if (rho <= 1e-8 * std::max(1.0, ynorm)) {
    rep.trials = 1;
    rep.bound = 1e-6 * ynorm;
    rep.successes = dist <= 1e-6 * ynorm ? 1 : 0;
    rep.verdict = rep.successes ? Verdict::Pass : Verdict::Fail;
    rep.note = "forward: target in the Krylov subspace; evidence [rho, ||X^(T) - Y||]";
    return rep;
  }
  // Converse: nothing the dynamics produce can get closer than rho. The
  // margin scales with ||y|| like the split threshold above.
  const Index k = x0.cols();
  const double margin = 1e-8 * std::max(1.0, ynorm);
  rep.trials = 1 + random_schedules;
  rep.bound = rho - margin;
  std::size_t ok = dist >= rho - margin ? 1 : 0;
  for (std::size_t r = 0; r < random_schedules; ++r) {
    Rng rng(derive_seed(seed, r));
    Prop3Schedule rnd = sched;
    const double sd = 1.0 / std::sqrt(static_cast<double>(k));
    for (std::size_t t = 0; t < rnd.T; ++t) {
      rnd.w1[t] = gaussian_matrix(k, k, 0.0, sd, rng);
      rnd.w2[t] = gaussian_matrix(k, k, 0.0, sd, rng);
    }
    const double d = (run_prop3_schedule(a, x0, rnd) - y).norm();
    rep.evidence.push_back(d);
    if (d >= rho - margin) ++ok;
  }
  rep.successes = ok;
  rep.verdict = ok == rep.trials ? Verdict::Pass : Verdict::Fail;
  rep.note = "converse: target outside the Krylov subspace; evidence [rho, distances...]";
  return rep;
}

double prop4_floor(const Vector& v, Index k) {
  const double b = v.sum();
  return static_cast<double>(k) * b * b / static_cast<double>(v.size()) * (1.0 - 1e-6);
}

PropReport check_prop4_bn_no_collapse(const OperatorMatrix& a, const FeatureMatrix& x0,
                                      const Vector& v, const CheckOptions& opt) {
  if (!(v.sum() > 0.0)) throw SetupError("v^T 1 must be positive");
  const auto ce = centered_eig(a, 1.0);
  const double scale = ce.size() ? std::max(1.0, std::abs(ce.values(0))) : 1.0;
  std::vector<Index> nz;
  for (Index i = 0; i < ce.size(); ++i)
    if (std::abs(ce.values(i)) > 1e-10 * scale) nz.push_back(i);
  const Matrix vnz = gather(ce.vectors, nz, 0, nz.size());
  if (numerical_rank(vnz.transpose() * x0) < 2)
    throw SetupError("Rank(V_{!=0}^T X0) must exceed 1");
  const double c_star = prop4_floor(v, x0.cols());
  PropReport rep;
  rep.id = "4";
  rep.trials = opt.trials;
  rep.bound = c_star;
  rep.evidence.assign(opt.trials, 0.0);
  LayerConfig cfg;
  cfg.variant = layer::BatchNorm{};
  cfg.weights = opt.weights;
  parallel_for(
      opt.trials,
      [&](std::size_t t) {
        Rng rng(derive_seed(opt.seed, t));
        double lowest = std::numeric_limits<double>::infinity();
        std::vector<Observer> obs{
            [&](std::size_t, const FeatureMatrix& x) { lowest = std::min(lowest, mu(x, v)); }};
        const auto log = run_trajectory(a, x0, cfg, opt.steps, rng, nullptr, obs);
        rep.evidence[t] = log.abort ? 0.0 : lowest;
      },
      opt.jobs);
  rep.successes = static_cast<std::size_t>(
      std::count_if(rep.evidence.begin(), rep.evidence.end(), [&](double m) { return m >= c_star; }));
  rep.verdict = rep.trials == 0 ? Verdict::Inconclusive
                                : (rep.successes == rep.trials ? Verdict::Pass : Verdict::Fail);
  rep.note = "min_t mu_v per trial against k (v^T 1)^2 / n";
  return rep;
}

ConvergenceTrace check_prop5_topk_convergence(const OperatorMatrix& a, const FeatureMatrix& x0,
                                              std::size_t k, const CheckOptions& opt) {
  const auto ce = centered_eig(a, 1.0);
  const auto idx = perp_indices(ce);
  if (k == 0 || k > idx.size()) throw DomainError("k must lie in [1, n-1]");
  const Matrix vk = gather(ce.vectors, idx, 0, k);
  if (numerical_rank(vk.transpose() * x0) < k) throw SetupError("Rank(V_k^T X0) < k");

  ConvergenceTrace tr;
  for (std::size_t q = k; q < idx.size(); ++q) tr.qs.push_back(static_cast<Index>(q));
  const double lk = ce.values(idx[k - 1]);
  if (k < idx.size()) {
    const double lk1 = ce.values(idx[k]);
    if (std::abs(lk) <= 1e-12 || !has_gap(lk, lk1)) {
      tr.verdict = Verdict::Inconclusive;
      tr.note = "no spectral gap between |l_k| and |l_{k+1}|";
      return tr;
    }
    tr.target_rate = std::log(std::abs(lk1) / std::abs(lk));
  }
  const Matrix vrest = gather(ce.vectors, idx, k, idx.size());
  tr.projections = Matrix::Zero(static_cast<Index>(opt.steps), vrest.cols());
  LayerConfig cfg;
  cfg.variant = layer::BatchNorm{};
  cfg.weights = opt.weights;
  Rng rng(opt.seed);
  std::vector<Observer> obs{[&](std::size_t t, const FeatureMatrix& x) {
    const Matrix c = vrest.transpose() * x;
    tr.projections.row(static_cast<Index>(t - 1)) = c.rowwise().norm().transpose();
  }};
  const auto log = run_trajectory(a, x0, cfg, opt.steps, rng, nullptr, obs);
  if (log.abort) {
    tr.verdict = Verdict::Fail;
    tr.note = "trajectory aborted at step " + std::to_string(log.abort->step) + ": " +
              log.abort->reason;
    return tr;
  }
  for (Index q = 0; q < vrest.cols(); ++q) {
    std::vector<double> col(tr.projections.rows());
    for (Index t = 0; t < tr.projections.rows(); ++t) col[t] = tr.projections(t, q);
    tr.slopes.push_back(fit_log_slope(col, 1e-12));
  }
  tr.final_topk_distance = subspace_distance(log.final_features, vk);
  // A NaN slope means the tail fell under the floor before two points were left.
  bool rate_ok = true;
  if (!tr.slopes.empty())
    rate_ok = std::isnan(tr.slopes.front())
                  ? tr.projections(tr.projections.rows() - 1, 0) <= 1e-12
                  : tr.slopes.front() <= tr.target_rate + 0.05;
  tr.verdict = rate_ok && tr.final_topk_distance < 1e-6 ? Verdict::Pass : Verdict::Fail;
  tr.note = "slope for q = k+1 against log(|l_{k+1}|/|l_k|) + 0.05";
  return tr;
}

Prop6Schedule build_prop6_schedule(const OperatorMatrix& a, const FeatureMatrix& x0,
                                   std::size_t k, double eps, FeatureMatrix* x_after) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (static_cast<Index>(k) != x0.cols()) throw ContractError("prop6 needs k feature columns");
  const auto ce = centered_eig(a, 1.0);
  const auto idx = perp_indices(ce);
  if (k == 0 || k >= idx.size() + 1) throw DomainError("k must lie in [1, n-1]");
  const Index n = a.size();
  const double lk = ce.values(idx[k - 1]);
  if (std::abs(lk) <= 1e-12 * std::max(1.0, std::abs(ce.values(idx[0]))))
    throw SetupError("|l_k| of the centered operator is zero");
  const double lk1 = k < idx.size() ? ce.values(idx[k]) : 0.0;
  if (!has_gap(lk, lk1)) throw SetupError("no spectral gap between |l_k| and |l_{k+1}|");
  const Matrix vk = gather(ce.vectors, idx, 0, k);
  if (numerical_rank(vk.transpose() * x0) < k) throw SetupError("Rank(V_k^T X0) < k");
  const Matrix vrest = gather(ce.vectors, idx, k, idx.size());
  const Matrix centered = center_operator(a, 1.0).data();

  Prop6Schedule s;
  const Index kk = static_cast<Index>(k);
  FeatureMatrix x = x0;
  for (Index m = 0; m < kk; ++m) {
    const Matrix sig = vk.transpose() * (centered * x);
    const double pivot = sig(m, m);
    if (std::abs(pivot) < 1e-12 * std::max(1.0, sig.row(m).cwiseAbs().maxCoeff()))
      throw SetupError("elimination pivot " + std::to_string(m) + " vanished");
    Matrix w = Matrix::Identity(kk, kk);
    for (Index i = 0; i < kk; ++i)
      if (i != m) w(m, i) = -sig(m, i) / pivot;
    x = step_batchnorm(a, x, w, Nonlinearity::Identity);
    s.weights.push_back(std::move(w));
  }
  if (x_after) *x_after = x;
  s.sigma_top = vk.transpose() * x;
  const Matrix tail = vrest.transpose() * x;
  s.sigma_tail_max = tail.size() ? tail.cwiseAbs().maxCoeff() : 0.0;

  std::size_t extra = 0;
  if (s.sigma_tail_max > 0.0 && lk1 != 0.0) {
    for (Index i = 0; i < kk; ++i) {
      const double cii = s.sigma_top(i, i);
      const double num = std::log(eps * cii * cii /
                                  (static_cast<double>(n - kk) * s.sigma_tail_max * s.sigma_tail_max));
      const double den = 2.0 * std::log(std::abs(lk1) / std::abs(ce.values(idx[i])));
      if (num < 0.0) extra = std::max(extra, static_cast<std::size_t>(std::ceil(num / den)));
    }
  }
  s.T = k + extra;
  s.weights.resize(s.T, Matrix::Identity(kk, kk));
  return s;
}

PropReport check_prop6_tightness(const OperatorMatrix& a, const FeatureMatrix& x0,
                                 std::size_t k, double eps, std::size_t extra) {
  PropReport rep;
  rep.id = "6";
  rep.bound = 1.0 / std::sqrt(1.0 + eps);
  Prop6Schedule s;
  try {
    s = build_prop6_schedule(a, x0, k, eps);
  } catch (const SetupError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
    return rep;
  }
  const auto ce = centered_eig(a, 1.0);
  const auto idx = perp_indices(ce);
  const Matrix vk = gather(ce.vectors, idx, 0, k);

  LayerConfig cfg;
  cfg.variant = layer::BatchNorm{};
  cfg.weights.mode = WeightSpec::Mode::Explicit;
  cfg.weights.w1 = s.weights;
  cfg.weights.w1.resize(s.T + extra, Matrix::Identity(x0.cols(), x0.cols()));
  Rng rng(0);
  std::vector<Observer> obs{[&](std::size_t t, const FeatureMatrix& x) {
    if (t < s.T) return;
    double worst = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < static_cast<Index>(k); ++i)
      worst = std::min(worst, std::abs(vk.col(i).dot(x.col(i))));
    rep.evidence.push_back(worst);
  }};
  const auto log = run_trajectory(a, x0, cfg, s.T + extra, rng, nullptr, obs);
  rep.trials = rep.evidence.size();
  rep.successes = static_cast<std::size_t>(std::count_if(
      rep.evidence.begin(), rep.evidence.end(), [&](double e) { return e >= *rep.bound; }));
  rep.verdict = !log.abort && rep.trials > 0 && rep.successes == rep.trials ? Verdict::Pass
                                                                            : Verdict::Fail;
  rep.note = "T = " + std::to_string(s.T) + "; evidence min_i |nu_i^T X_i| for t = T..T+" +
             std::to_string(extra);
  return rep;
}

PropReport check_prop7_centering(const Graph& g, double tau) {
  const auto c = check_centering_effect(g, tau);
  PropReport rep;
  rep.id = "7";
  rep.trials = 1;
  rep.evidence = {c.claim1_max_residual, c.claim2_residual, c.trace_gap, c.trace_gap_expected};
  rep.note = "evidence [claim1 residual, claim2 Rayleigh residual, trace gap, tau 2|E|/n]";
  if (!c.claim2_applicable) rep.note += "; claim 2 skipped (regular graph)";
  if (!c.claim3_applicable) {
    rep.verdict = Verdict::Inconclusive;
    rep.note += "; no edges, trace gap is 0";
    return rep;
  }
  const bool ok = c.claim1 && (c.claim2 || !c.claim2_applicable) && c.claim3;
  rep.successes = ok ? 1 : 0;
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return rep;
}

ConvergenceTrace check_vanilla_oversmoothing(const Graph& g, const FeatureMatrix& x0,
                                             const CheckOptions& opt, bool cap_weights) {
  if (!g.is_connected()) throw SetupError("vanilla oversmoothing check needs a connected graph");
  const auto a = build_operator(g, OperatorKind::SymNormalized);
  const auto es = symmetric_eig(a);
  const Vector v = es.vectors.col(0);
  ConvergenceTrace tr;
  tr.target_rate = es.size() > 1 ? std::log(std::abs(es.values(1) / es.values(0))) : 0.0;
  const double mu0 = mu(x0, v);
  if (mu0 <= 1e-24 * std::max(1.0, x0.squaredNorm())) {
    tr.verdict = Verdict::Inconclusive;
    tr.note = "mu_v(X0) = 0; features stay in span(v)";
    return tr;
  }
  const Index k = x0.cols();
  Rng rng(opt.seed);
  tr.projections = Matrix::Zero(static_cast<Index>(opt.steps), 2);
  FeatureMatrix x = x0;
  for (std::size_t t = 0; t < opt.steps; ++t) {
    Matrix w = sample_weight(opt.weights, k, rng, t);
    if (cap_weights) {
      const auto sv = singular_values(w);
      if (sv.size() && sv(0) > 1.0) w /= sv(0);
    }
    x = step_vanilla(a, x, w, Nonlinearity::Identity);
    const double m = mu(x, v);
    tr.projections(static_cast<Index>(t), 0) = std::sqrt(m);
    const double fro = x.norm();
    tr.projections(static_cast<Index>(t), 1) = fro > 0.0 ? std::sqrt(m) / fro : 0.0;
  }
  std::vector<double> rel(opt.steps), raw(opt.steps);
  for (std::size_t t = 0; t < opt.steps; ++t) {
    raw[t] = tr.projections(static_cast<Index>(t), 0);
    rel[t] = tr.projections(static_cast<Index>(t), 1);
  }
  tr.slopes = {fit_log_slope(rel, 1e-12), fit_log_slope(raw, 0.0)};
  const double last = raw.empty() ? std::sqrt(mu0) : raw.back();
  const bool decayed = last * last <= 1e-6 * mu0;
  tr.verdict = decayed && tr.slopes[0] < 0.0 ? Verdict::Pass : Verdict::Fail;
  tr.note = "projections [sqrt(mu_v), sqrt(mu_v)/||X||_F]; slopes fitted on the same";
  return tr;
}

}  // namespace oversmooth
