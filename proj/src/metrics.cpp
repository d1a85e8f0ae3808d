#include "oversmooth/metrics.hpp"

#include <cmath>
#include <string>

#include "oversmooth/errors.hpp"

namespace oversmooth {

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::AllOnes: return "ones";
    case ReferenceKind::DegreeSqrt: return "degree";
    case ReferenceKind::DominantEig: return "dominant";
    case ReferenceKind::Custom: return "custom";
  }
  return "?";
}

ReferenceKind parse_reference_kind(std::string_view text) {
  for (auto k : {ReferenceKind::AllOnes, ReferenceKind::DegreeSqrt, ReferenceKind::DominantEig})
    if (to_string(k) == text) return k;
  throw ParseError("unknown reference vector \"" + std::string(text) +
                   "\" (ones|degree|dominant)");
}

ReferenceVector::ReferenceVector(Vector v, ReferenceKind kind) : v_(std::move(v)), kind_(kind) {
  if (std::abs(v_.norm() - 1.0) > 1e-10) throw ContractError("reference vector is not unit norm");
}

ReferenceVector ReferenceVector::all_ones(Index n) {
  return ReferenceVector(Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n))),
                         ReferenceKind::AllOnes);
}

ReferenceVector ReferenceVector::degree_sqrt(const Graph& g) {
  Vector d = g.degrees().cwiseSqrt();
  const double norm = d.norm();
  if (norm == 0.0) throw DomainError("degree vector of an edgeless graph");
  return ReferenceVector(d / norm, ReferenceKind::DegreeSqrt);
}

ReferenceVector ReferenceVector::dominant(const OperatorMatrix& a) {
  const auto es = symmetric_eig(a);
  return ReferenceVector(es.vectors.col(0), ReferenceKind::DominantEig);
}

ReferenceVector ReferenceVector::make(ReferenceKind kind, const Graph& g, const OperatorMatrix& a) {
  switch (kind) {
    case ReferenceKind::AllOnes: return all_ones(static_cast<Index>(g.size()));
    case ReferenceKind::DegreeSqrt: return degree_sqrt(g);
    case ReferenceKind::DominantEig: return dominant(a);
    case ReferenceKind::Custom: break;
  }
  throw ContractError("custom reference vectors are built directly");
}

double mu(const Matrix& x, const Vector& v) {
  if (v.size() != x.rows()) throw ContractError("mu: size mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10) throw ContractError("mu: v is not unit norm");
  return (x - v * (v.transpose() * x)).squaredNorm();
}

double mu(const Matrix& x, const ReferenceVector& v) { return mu(x, v.v()); }

double dirichlet(const Graph& g, const Matrix& x) {
  if (x.rows() != static_cast<Index>(g.size())) throw ContractError("dirichlet: size mismatch");
  const Vector d = g.degrees();
  for (Index i = 0; i < d.size(); ++i)
    if (!(d(i) > 0.0)) throw DomainError("node " + std::to_string(i) + " is isolated");
  const Vector s = d.cwiseSqrt().cwiseInverse();
  double e = 0.0;
  for (const auto& edge : g.edges()) {
    if (edge.u == edge.v) continue;
    const auto u = static_cast<Index>(edge.u), v = static_cast<Index>(edge.v);
    e += edge.w * (s(u) * x.row(u) - s(v) * x.row(v)).squaredNorm();
  }
  return 0.5 * e;
}

namespace {
Matrix scale_columns(const Matrix& x, bool one_norm) {
  Matrix out = x;
  for (Index j = 0; j < x.cols(); ++j) {
    const double n1 = x.col(j).lpNorm<1>();
    if (n1 < kZeroColumnNorm) {
      out.col(j).setZero();
      continue;
    }
    out.col(j) /= one_norm ? n1 : x.col(j).norm();
  }
  return out;
}
}  // namespace

double col_distance(const Matrix& x) {
  const Index k = x.cols();
  if (k == 0) return 0.0;
  const Matrix y = scale_columns(x, true);
  double total = 0.0;
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j) total += 2.0 * (y.col(i) - y.col(j)).norm();
  return total / static_cast<double>(k * k);
}

double col_projection_distance(const Matrix& x) {
  const Index k = x.cols();
  if (k == 0) return 0.0;
  const Matrix y = scale_columns(x, false);
  double total = 0.0;
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j) total += 2.0 * (1.0 - y.col(i).dot(y.col(j)));
  return total / static_cast<double>(k * k);
}

double eigenspace_distance(const Matrix& x, const EigenSystem& es,
                           std::optional<std::size_t> width) {
  const Matrix basis = width ? top_k(es, *width) : es.vectors;
  return subspace_distance(x, basis);
}

EquivalenceReport measure_equivalence_check(const Graph& g, const Matrix& x) {
  if (!g.is_connected()) throw DomainError("measure equivalence needs a connected graph");
  const Index n = static_cast<Index>(g.size());
  EquivalenceReport rep;
  const auto v = ReferenceVector::degree_sqrt(g);
  rep.mu = mu(x, v);
  rep.energy = dirichlet(g, x);

  // E(X) = (1/2) sum_j x_j^T Q x_j with Q v = 0.
  const Vector s = g.degrees().cwiseSqrt().cwiseInverse();
  Matrix q = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    if (e.u == e.v) continue;
    const auto u = static_cast<Index>(e.u), w = static_cast<Index>(e.v);
    q(u, u) += e.w * s(u) * s(u);
    q(w, w) += e.w * s(w) * s(w);
    q(u, w) -= e.w * s(u) * s(w);
    q(w, u) -= e.w * s(u) * s(w);
  }
  const auto es = symmetric_eig(q);
  // The kernel direction v has the smallest |eigenvalue|; Q is PSD.
  rep.c2 = 0.5 * es.values(0);
  rep.c1 = n > 1 ? 0.5 * es.values(n - 2) : 0.0;
  const double scale = std::max(1.0, x.squaredNorm());
  const double slack = 1e-9 * scale;
  rep.bounds_hold = rep.c1 * rep.mu <= rep.energy + slack && rep.energy <= rep.c2 * rep.mu + slack;
  rep.unit_upper_bound = rep.energy <= rep.mu + slack;
  const bool e_zero = rep.energy <= 1e-12 * scale;
  const bool mu_zero = rep.mu <= 1e-12 * scale;
  rep.zero_set_equivalent = e_zero == mu_zero;
  return rep;
}

MetricRecord MetricContext::measure(std::size_t step, const Matrix& x) const {
  MetricRecord r;
  r.step = step;
  if (v.size() > 0) r.mu_v = mu(x, v);
  if (graph) r.dirichlet = dirichlet(*graph, x);
  r.d_col = col_distance(x);
  r.d_pcol = col_projection_distance(x);
  if (full_basis.size() > 0) r.d_ev = subspace_distance_unchecked(x, full_basis);
  r.rank = numerical_rank(x, rank_tol);
  if (topk_basis.size() > 0) r.top_k_dist = subspace_distance_unchecked(x, topk_basis);
  return r;
}

}  // namespace oversmooth
