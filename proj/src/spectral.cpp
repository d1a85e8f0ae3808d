#include "oversmooth/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "oversmooth/errors.hpp"

namespace oversmooth {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kTieTol = 1e-10;
constexpr double kZeroEntry = 1e-10;

void fix_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  const double big = v.cwiseAbs().maxCoeff();
  if (big == 0.0) return;
  for (Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) >= big * (1.0 - 1e-9)) {
      if (v(i) < 0.0) v = -v;
      return;
    }
}

Index first_nonzero(const Vector& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > kZeroEntry) return i;
  return v.size();
}

// Sign-fixes every column and applies the tie-breaking order. A column listed
// in `pin_last` sorts after the rest of its |lambda| cluster.
EigenSystem finalize(const Vector& values, Matrix vectors, std::optional<Index> pin_last = {}) {
  const Index m = values.size();
  for (Index i = 0; i < m; ++i) fix_sign(vectors.col(i));

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(values(a)) > std::abs(values(b));
  });

  std::vector<Index> firstnz(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) firstnz[i] = first_nonzero(vectors.col(i));

  std::size_t start = 0;
  while (start < order.size()) {
    const double head = std::abs(values(order[start]));
    const double tol = kTieTol * std::max(1.0, head);
    std::size_t end = start + 1;
    while (end < order.size() && head - std::abs(values(order[end])) <= tol) ++end;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(start),
              order.begin() + static_cast<std::ptrdiff_t>(end), [&](Index a, Index b) {
                const bool pa = pin_last && *pin_last == a, pb = pin_last && *pin_last == b;
                if (pa != pb) return pb;
                const bool na = values(a) < -tol, nb = values(b) < -tol;
                if (na != nb) return nb;
                if (firstnz[a] != firstnz[b]) return firstnz[a] < firstnz[b];
                return a < b;
              });
    start = end;
  }

  EigenSystem es;
  es.values.resize(m);
  es.vectors.resize(vectors.rows(), m);
  for (Index i = 0; i < m; ++i) {
    es.values(i) = values(order[i]);
    es.vectors.col(i) = vectors.col(order[i]);
    if (pin_last && order[i] == *pin_last) es.kernel_index = i;
  }
  return es;
}

struct RawEig {
  Vector values;
  Matrix vectors;
};

// Cyclic-by-row Jacobi with the symmetric 2x2 Schur rotation.
RawEig jacobi(Matrix a) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  const double fro = a.norm();
  auto off_norm = [&]() {
    double s = 0.0;
    for (Index q = 0; q < n; ++q)
      for (Index p = 0; p < n; ++p)
        if (p != q) s += a(p, q) * a(p, q);
    return std::sqrt(s);
  };
  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_norm();
    if (off <= 1e-12 * fro) break;
    if (sweep == kMaxSweeps)
      throw ConvergenceError("Jacobi eigensolver did not converge in " +
                             std::to_string(kMaxSweeps) + " sweeps (n=" + std::to_string(n) +
                             ", off-diagonal norm " + std::to_string(off) + ", ||M||_F " +
                             std::to_string(fro) + ")");
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150)
          t = 0.5 / theta;
        else
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double app = a(p, p), aqq = a(q, q);
        for (Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = c * arq + s * arp;
        }
        for (Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          a(p, r) = a(r, p);
          a(q, r) = a(r, q);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  return {a.diagonal(), std::move(v)};
}

double residual(const Matrix& m, double lambda, const Vector& v) {
  return (m * v - lambda * v).norm();
}

bool residual_ok(const Matrix& m, double lambda, const Vector& v) {
  return residual(m, lambda, v) <= 1e-8 * std::max(1.0, std::abs(lambda));
}

}  // namespace

EigenSystem symmetric_eig(const Matrix& m) {
  if (m.rows() != m.cols()) throw ContractError("symmetric_eig needs a square matrix");
  if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ContractError("symmetric_eig needs a symmetric matrix");
  const Matrix sym = 0.5 * (m + m.transpose());
  auto raw = jacobi(sym);
  auto es = finalize(raw.values, std::move(raw.vectors));
  es.source_symmetric = true;
  return es;
}

EigenSystem symmetric_eig(const OperatorMatrix& m) {
  if (!m.symmetric()) throw ContractError("symmetric_eig needs a symmetric operator");
  return symmetric_eig(m.data());
}

EigenSystem general_eig(const Matrix& m, bool require_real) {
  if (m.rows() != m.cols()) throw ContractError("general_eig needs a square matrix");
  const Index n = m.rows();
  if (n == 0) return EigenSystem{};
  Eigen::EigenSolver<Matrix> solver(m, true);
  if (solver.info() != Eigen::Success) throw ConvergenceError("general eigensolver failed");
  const auto& lam = solver.eigenvalues();
  std::vector<double> values;
  std::vector<Vector> vectors;
  std::size_t complex = 0, inaccurate = 0;
  for (Index i = 0; i < n; ++i) {
    const double re = lam(i).real(), im = lam(i).imag();
    if (std::abs(im) > 1e-10 * std::max(1.0, std::abs(lam(i)))) {
      ++complex;
      continue;
    }
    Vector v = solver.eigenvectors().col(i).real();
    if (v.norm() == 0.0) v = solver.eigenvectors().col(i).imag();
    v.normalize();
    if (!residual_ok(m, re, v)) {
      // A few inverse-iteration steps with a slightly perturbed shift.
      const double shift = re + 1e-10 * std::max(1.0, std::abs(re));
      Eigen::PartialPivLU<Matrix> lu(m - shift * Matrix::Identity(n, n));
      for (int it = 0; it < 3; ++it) {
        v = lu.solve(v);
        v.normalize();
      }
    }
    if (!v.allFinite() || !residual_ok(m, re, v)) {
      ++inaccurate;
      continue;
    }
    values.push_back(re);
    vectors.push_back(std::move(v));
  }
  if (require_real && complex > 0)
    throw DomainError(std::to_string(complex) + " complex eigenvalues present");
  Vector vals(static_cast<Index>(values.size()));
  Matrix vecs(n, static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    vals(static_cast<Index>(i)) = values[i];
    vecs.col(static_cast<Index>(i)) = vectors[i];
  }
  auto es = finalize(vals, std::move(vecs));
  es.skipped_complex = complex;
  es.skipped_inaccurate = inaccurate;
  return es;
}

EigenSystem centered_eig(const OperatorMatrix& a, double tau, bool require_real) {
  if (!a.symmetric()) throw ContractError("centered_eig needs a symmetric operator");
  if (tau == 0.0) return symmetric_eig(a.data());
  const Matrix centered = center_operator(a, tau).data();
  if (tau != 1.0) return general_eig(centered, require_real);

  const Index n = a.size();
  if (n == 0) return EigenSystem{};
  if (n == 1) {
    EigenSystem es;
    es.values = Vector::Zero(1);
    es.vectors = Matrix::Ones(1, 1);
    es.kernel_index = 0;
    return es;
  }

  // Householder reflector H with H e_1 = 1/sqrt(n); columns 2..n of H span 1-perp.
  const Matrix& A = a.data();
  const double rs = 1.0 / std::sqrt(static_cast<double>(n));
  Vector u = Vector::Constant(n, rs);
  u(0) -= 1.0;
  const double beta = 2.0 / u.squaredNorm();
  const Vector p = beta * (A * u);
  const Vector q = p - (0.5 * beta * u.dot(p)) * u;
  Matrix hah = A - u * q.transpose() - q * u.transpose();
  Matrix b = hah.bottomRightCorner(n - 1, n - 1);
  b = 0.5 * (b + b.transpose()).eval();
  auto raw = jacobi(b);

  const Vector utail = u.tail(n - 1);
  auto lift = [&](const Vector& y) {
    Vector v(n);
    v(0) = 0.0;
    v.tail(n - 1) = y;
    v -= (beta * utail.dot(y)) * u;
    return v;
  };

  // Kernel direction z = 1/sqrt(n) + Q y with B y = -Q^T A 1/sqrt(n).
  Vector a1 = A * Vector::Constant(n, rs);
  const Vector ha1 = a1 - (beta * u.dot(a1)) * u;
  const Vector c = ha1.tail(n - 1);
  const double mu_max = raw.values.size() ? raw.values.cwiseAbs().maxCoeff() : 0.0;
  const double thr = 1e-12 * std::max(1.0, mu_max);
  Vector y = Vector::Zero(n - 1);
  for (Index i = 0; i < raw.values.size(); ++i)
    if (std::abs(raw.values(i)) > thr)
      y -= (raw.vectors.col(i).dot(c) / raw.values(i)) * raw.vectors.col(i);
  Vector z = lift(y) + Vector::Constant(n, rs);
  z.normalize();
  const bool has_kernel = (centered * z).norm() <= 1e-8;

  const Index m = n - 1 + (has_kernel ? 1 : 0);
  Vector vals(m);
  Matrix vecs(n, m);
  for (Index i = 0; i < n - 1; ++i) {
    vals(i) = raw.values(i);
    vecs.col(i) = lift(raw.vectors.col(i));
  }
  std::optional<Index> pin;
  if (has_kernel) {
    vals(n - 1) = 0.0;
    vecs.col(n - 1) = z;
    pin = n - 1;
  }
  auto es = finalize(vals, std::move(vecs), pin);
  es.defective = !has_kernel;
  return es;
}

Matrix top_k(const EigenSystem& es, std::size_t k) {
  if (static_cast<Index>(k) > es.vectors.cols())
    throw DomainError("top_k: k=" + std::to_string(k) + " exceeds " +
                      std::to_string(es.vectors.cols()) + " eigenvectors");
  return es.vectors.leftCols(static_cast<Index>(k));
}

Vector singular_values(const Matrix& x) {
  if (x.size() == 0) return Vector();
  const Matrix tall = x.rows() >= x.cols() ? x : Matrix(x.transpose());
  const Index k = tall.cols();
  Eigen::HouseholderQR<Matrix> qr(tall);
  Matrix u = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  // One-sided (Hestenes) Jacobi on R. Columns at roundoff level relative to
  // ||R|| are left alone; rotating them only shuffles noise.
  const double negligible = std::pow(std::numeric_limits<double>::epsilon() * u.norm(), 2);
  for (int sweep = 0;; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < k; ++p) {
      for (Index q = p + 1; q < k; ++q) {
        const double alpha = u.col(p).squaredNorm();
        const double beta = u.col(q).squaredNorm();
        const double gamma = u.col(p).dot(u.col(q));
        if (alpha <= negligible || beta <= negligible) continue;
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Vector up = u.col(p);
        u.col(p) = c * up - s * u.col(q);
        u.col(q) = s * up + c * u.col(q);
      }
    }
    if (!rotated) break;
    if (sweep + 1 == kMaxSweeps)
      throw ConvergenceError("one-sided Jacobi SVD did not converge");
  }
  Vector sigma = u.colwise().norm().transpose();
  std::sort(sigma.data(), sigma.data() + sigma.size(), std::greater<>());
  return sigma;
}

std::size_t numerical_rank(const Matrix& x, double rel_tol) {
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
  const Vector sigma = singular_values(x);
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double thr =
      rel_tol * sigma(0) * static_cast<double>(std::max(x.rows(), x.cols()));
  return static_cast<std::size_t>((sigma.array() > thr).count());
}

void require_orthonormal(const Matrix& basis, double tol) {
  if (basis.cols() == 0) return;
  const Matrix gram = basis.transpose() * basis;
  const double err = (gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (!(err <= tol))
    throw ContractError("basis is not orthonormal (max |B^T B - I| = " + std::to_string(err) +
                        ")");
}

double subspace_distance_unchecked(const Matrix& x, const Matrix& basis) {
  if (x.rows() != basis.rows()) throw ContractError("subspace_distance: row mismatch");
  if (x.rows() == 0) return 0.0;
  const Matrix resid = x - basis * (basis.transpose() * x);
  return resid.norm() / static_cast<double>(x.rows());
}

double subspace_distance(const Matrix& x, const Matrix& basis) {
  require_orthonormal(basis);
  return subspace_distance_unchecked(x, basis);
}

Vector KrylovBasis::expand(const Vector& y) const {
  if (r == 0) return Vector();
  const Vector c = basis.transpose() * y;
  return R.triangularView<Eigen::Upper>().solve(c);
}

KrylovBasis krylov_basis(const Matrix& a, const Matrix& x0) {
  const Index n = a.rows();
  if (a.cols() != n || x0.rows() != n) throw ContractError("krylov_basis: shape mismatch");
  const Index k = x0.cols();
  Matrix q(n, n);
  Matrix r = Matrix::Zero(n, n);
  KrylovBasis kb;
  Index dim = 0;
  double max_norm = 0.0;
  Matrix cur = x0;
  for (Index power = 0; power < n && dim < n; ++power) {
    bool added = false;
    for (Index j = 0; j < k && dim < n; ++j) {
      Vector g = cur.col(j);
      max_norm = std::max(max_norm, g.norm());
      if (max_norm == 0.0) continue;
      Vector coeff = Vector::Zero(dim + 1);
      // Two MGS passes keep the basis orthonormal to working precision.
      for (int pass = 0; pass < 2; ++pass)
        for (Index m = 0; m < dim; ++m) {
          const double h = q.col(m).dot(g);
          coeff(m) += h;
          g -= h * q.col(m);
        }
      const double res = g.norm();
      if (res < 1e-10 * max_norm) continue;
      coeff(dim) = res;
      q.col(dim) = g / res;
      r.col(dim).head(dim + 1) = coeff;
      kb.kept.push_back({power, j});
      ++dim;
      added = true;
    }
    if (!added) break;
    cur = a * cur;
  }
  kb.r = dim;
  kb.basis = q.leftCols(dim);
  kb.R = r.topLeftCorner(dim, dim);
  return kb;
}

KrylovBasis krylov_basis(const OperatorMatrix& a, const Matrix& x0) {
  return krylov_basis(a.data(), x0);
}

}  // namespace oversmooth
