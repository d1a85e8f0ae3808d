#pragma once

// Independent oracles and random generators shared by the test binaries.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <tuple>
#include <vector>

#include "oversmooth/graph.hpp"
#include "oversmooth/types.hpp"

namespace oversmooth::testing {

// Roots of the characteristic polynomial, sorted ascending. The polynomial
// comes from Faddeev-LeVerrier and the roots from Durand-Kerner; only meant
// for n <= 8 with real spectra.
inline std::vector<double> charpoly_eigenvalues(const Matrix& a) {
  const Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);  // c[k] multiplies x^(n-k)
  c[0] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * Matrix::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  using C = std::complex<double>;
  auto eval = [&](C x) {
    C r = 1.0;
    for (Index k = 1; k <= n; ++k) r = r * x + c[static_cast<std::size_t>(k)];
    return r;
  };
  std::vector<C> z(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = std::pow(C(0.4, 0.9), static_cast<double>(i));
  for (int it = 0; it < 2000; ++it)
    for (std::size_t i = 0; i < z.size(); ++i) {
      C den = 1.0;
      for (std::size_t j = 0; j < z.size(); ++j)
        if (j != i) den *= z[i] - z[j];
      z[i] -= eval(z[i]) / den;
    }
  std::vector<double> out;
  for (const auto& r : z) out.push_back(r.real());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t svd_rank(const Matrix& x, double rel_tol) {
  if (x.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(x);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = rel_tol * s(0) * static_cast<double>(std::max(x.rows(), x.cols()));
  return static_cast<std::size_t>((s.array() > cut).count());
}

// Dense adjacency assembled straight from the edge list.
inline Matrix dense_adjacency(const Graph& g) {
  const auto n = static_cast<Index>(g.size());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(static_cast<Index>(e.u), static_cast<Index>(e.v)) = e.w;
    a(static_cast<Index>(e.v), static_cast<Index>(e.u)) = e.w;
  }
  return a;
}

inline bool is_equitable(const Matrix& a, const std::vector<std::size_t>& colors, std::size_t m) {
  const auto n = static_cast<Index>(colors.size());
  Matrix counts = Matrix::Zero(n, static_cast<Index>(m));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) counts(i, static_cast<Index>(colors[static_cast<std::size_t>(j)])) += a(i, j);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (colors[static_cast<std::size_t>(i)] == colors[static_cast<std::size_t>(j)] &&
          (counts.row(i) - counts.row(j)).cwiseAbs().maxCoeff() > 1e-9)
        return false;
  return true;
}

// Coarsest equitable partition by enumerating every set partition in
// restricted-growth form. Returns the canonical coloring with the fewest
// classes.
inline std::vector<std::size_t> brute_force_coarsest(const Matrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<std::size_t> rg(n, 0), best;
  std::size_t best_m = n + 1;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t m) {
    if (i == n) {
      if (m < best_m && is_equitable(a, rg, m)) {
        best_m = m;
        best = rg;
      }
      return;
    }
    for (std::size_t c = 0; c <= m; ++c) {
      rg[i] = c;
      rec(i + 1, std::max(m, c + 1));
    }
  };
  if (n == 0) return {};
  rec(0, 0);
  return best;
}

inline Vector power_iteration(const Matrix& a, Vector x, int iters) {
  for (int i = 0; i < iters; ++i) {
    x = a * x;
    x /= x.norm();
  }
  return x;
}

// Random connected graph: a random spanning tree plus extra edges.
inline Graph random_connected_graph(std::size_t n, double extra_p, Rng& rng, bool weighted = false) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    const auto parent = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    edges.push_back({parent, i, weighted ? 0.5 + uniform01(rng) : 1.0});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < extra_p) edges.push_back({i, j, weighted ? 0.5 + uniform01(rng) : 1.0});
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.u, x.v) < std::tie(y.u, y.v);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& x, const Edge& y) { return x.u == y.u && x.v == y.v; }),
              edges.end());
  return Graph(n, edges);
}

inline Matrix random_symmetric(Index n, Rng& rng) {
  const Matrix m = gaussian_matrix(n, n, 0.0, 1.0, rng);
  return 0.5 * (m + m.transpose());
}

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i)
    std::swap(p[i - 1], p[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
  return p;
}

inline Graph permute_graph(const Graph& g, const std::vector<std::size_t>& p) {
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({p[e.u], p[e.v], e.w});
  return Graph(g.size(), edges);
}

inline Matrix permute_rows(const Matrix& x, const std::vector<std::size_t>& p) {
  Matrix out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) out.row(static_cast<Index>(p[static_cast<std::size_t>(i)])) = x.row(i);
  return out;
}

}  // namespace oversmooth::testing
