#include "oversmooth/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>

#include "oversmooth/errors.hpp"

namespace oversmooth {

EquitablePartition EquitablePartition::from_colors(const std::vector<std::size_t>& colors) {
  EquitablePartition ep;
  std::map<std::size_t, std::size_t> ids;
  ep.colors.reserve(colors.size());
  for (auto c : colors) {
    auto it = ids.find(c);
    if (it == ids.end()) it = ids.emplace(c, ids.size()).first;
    ep.colors.push_back(it->second);
  }
  ep.m = ids.size();
  return ep;
}

Matrix EquitablePartition::indicator() const {
  Matrix h = Matrix::Zero(static_cast<Index>(colors.size()), static_cast<Index>(m));
  for (std::size_t i = 0; i < colors.size(); ++i)
    h(static_cast<Index>(i), static_cast<Index>(colors[i])) = 1.0;
  return h;
}

std::vector<std::size_t> EquitablePartition::class_sizes() const {
  std::vector<std::size_t> sizes(m, 0);
  for (auto c : colors) ++sizes[c];
  return sizes;
}

EquitablePartition wl_round(const Graph& g, const EquitablePartition& ep) {
  using Signature = std::pair<std::size_t, std::vector<std::pair<std::size_t, std::int64_t>>>;
  const auto nb = g.neighbors();
  std::map<Signature, std::size_t> dict;
  std::vector<std::size_t> next(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    Signature sig{ep.colors[v], {}};
    sig.second.reserve(nb[v].size());
    for (const auto& [x, w] : nb[v])
      sig.second.emplace_back(ep.colors[x], std::llround(w * 1e12));
    std::sort(sig.second.begin(), sig.second.end());
    auto it = dict.find(sig);
    if (it == dict.end()) it = dict.emplace(std::move(sig), dict.size()).first;
    next[v] = it->second;
  }
  return EquitablePartition::from_colors(next);
}

EquitablePartition wl_refine(const Graph& g) {
  auto ep = EquitablePartition::from_colors(std::vector<std::size_t>(g.size(), 0));
  while (true) {
    auto next = wl_round(g, ep);
    if (next.m <= ep.m) return ep;
    ep = std::move(next);
  }
}

QuotientGraph quotient(const Matrix& a, const EquitablePartition& ep) {
  if (a.rows() != static_cast<Index>(ep.colors.size()) || a.cols() != a.rows())
    throw ContractError("quotient: operator and partition sizes differ");
  const Matrix h = ep.indicator();
  const auto sizes = ep.class_sizes();
  Vector inv(static_cast<Index>(ep.m));
  for (std::size_t c = 0; c < ep.m; ++c) inv(static_cast<Index>(c)) = 1.0 / static_cast<double>(sizes[c]);
  const Matrix ah = a * h;
  QuotientGraph q;
  q.a_pi = inv.asDiagonal() * (h.transpose() * ah);
  q.class_sizes = sizes;
  if (ah.size() > 0 && (ah - h * q.a_pi).cwiseAbs().maxCoeff() > 1e-9)
    throw ContractError("partition not equitable");
  return q;
}

QuotientGraph quotient(const Graph& g, const EquitablePartition& ep) {
  return quotient(g.adjacency(), ep);
}

QuotientSpectrum quotient_eig(const Matrix& a, const EquitablePartition& ep) {
  const auto q = quotient(a, ep);
  const Matrix h = ep.indicator();
  Vector dm(static_cast<Index>(ep.m));
  for (std::size_t c = 0; c < ep.m; ++c)
    dm(static_cast<Index>(c)) = 1.0 / std::sqrt(static_cast<double>(q.class_sizes[c]));
  // D^{1/2} A^pi D^{-1/2} = D^{-1/2} H^T A H D^{-1/2}.
  Matrix s = dm.asDiagonal() * (h.transpose() * a * h) * dm.asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();
  const auto es = symmetric_eig(s);
  QuotientSpectrum out;
  out.values = es.values;
  out.vectors_pi = dm.asDiagonal() * es.vectors;
  out.lifted = h * out.vectors_pi;
  return out;
}

EigenpairSplit split_eigenpairs(const EigenSystem& es, const EquitablePartition& ep) {
  const Index n = es.vectors.rows();
  if (n != static_cast<Index>(ep.colors.size()))
    throw ContractError("split_eigenpairs: eigensystem and partition sizes differ");
  const Matrix h = ep.indicator();
  const auto sizes = ep.class_sizes();
  Vector inv(static_cast<Index>(ep.m));
  for (std::size_t c = 0; c < ep.m; ++c) inv(static_cast<Index>(c)) = 1.0 / static_cast<double>(sizes[c]);
  auto project = [&](const Matrix& v) -> Matrix {
    return h * (inv.asDiagonal() * (h.transpose() * v));
  };

  EigenpairSplit split;
  split.vectors = es.vectors;
  const Index m = es.vectors.cols();
  Index start = 0;
  while (start < m) {
    Index end = start + 1;
    while (end < m && std::abs(es.values(end) - es.values(start)) < 1e-8) ++end;
    const Index c = end - start;
    if (c > 1) {
      const Matrix block = es.vectors.middleCols(start, c);
      Matrix gram = block.transpose() * project(block);
      gram = 0.5 * (gram + gram.transpose()).eval();
      // Directions of the cluster with the largest share inside col(H) first.
      const auto rot = symmetric_eig(gram);
      std::vector<Index> order(static_cast<std::size_t>(c));
      for (Index i = 0; i < c; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](Index x, Index y) { return rot.values(x) > rot.values(y); });
      for (Index i = 0; i < c; ++i) {
        Vector v = block * rot.vectors.col(order[i]);
        split.vectors.col(start + i) = v / v.norm();
      }
    }
    start = end;
  }
  for (Index i = 0; i < m; ++i) {
    const Vector v = split.vectors.col(i);
    const double off = (v - project(v)).norm();
    (off <= 1e-8 ? split.structural : split.rest).push_back(i);
  }
  return split;
}

CenteringReport check_centering_effect(const OperatorMatrix& a, const EquitablePartition& ep,
                                       double tau) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  if (!a.symmetric()) throw ContractError("check_centering_effect needs a symmetric operator");
  const Index n = a.size();
  CenteringReport rep;
  rep.tau = tau;
  if (n == 0) return rep;
  const Matrix& A = a.data();
  const Matrix C = center_operator(a, tau).data();
  const Vector deg = A.rowwise().sum();
  rep.regular = (deg.array() - deg(0)).abs().maxCoeff() <= 1e-12;

  const auto es = symmetric_eig(A);
  const auto split = split_eigenpairs(es, ep);
  rep.rest_count = split.rest.size();
  for (auto i : split.rest) {
    const Vector v = split.vectors.col(i);
    rep.claim1_max_residual =
        std::max(rep.claim1_max_residual, (C * v - es.values(i) * v).norm());
  }
  rep.claim1 = rep.claim1_max_residual <= 1e-8;

  const Vector v = es.vectors.col(0);
  const Vector cv = C * v;
  rep.claim2_residual = (cv - v.dot(cv) * v).norm();
  rep.claim2_applicable = !rep.regular;
  rep.claim2 = rep.claim2_residual > 1e-6;

  rep.trace_gap = A.trace() - C.trace();
  rep.trace_gap_expected = tau * A.sum() / static_cast<double>(n);
  rep.claim3_applicable = A.sum() > 0.0;
  rep.claim3 = rep.trace_gap > 0.0 &&
               std::abs(rep.trace_gap - rep.trace_gap_expected) <=
                   1e-10 * std::max(1.0, std::abs(rep.trace_gap_expected));
  return rep;
}

CenteringReport check_centering_effect(const Graph& g, double tau) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  return check_centering_effect(build_operator(g, OperatorKind::Adjacency), wl_refine(g), tau);
}

}  // namespace oversmooth
