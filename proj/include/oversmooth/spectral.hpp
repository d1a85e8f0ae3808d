#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "oversmooth/graph.hpp"
#include "oversmooth/types.hpp"

namespace oversmooth {

/// Eigenpairs sorted by descending |lambda|.
///
/// Ties (|lambda| equal to 1e-10 relative) put nonnegative values first, then
/// order by the index of the first nonzero vector entry. Each vector's sign is
/// fixed so its first largest-magnitude entry is positive.
struct EigenSystem {
  Vector values;
  /// Column i pairs with values[i]; may hold fewer than n columns when the
  /// general solver skips complex pairs.
  Matrix vectors;
  bool source_symmetric = false;
  /// Set when the centered operator contributes a kernel direction outside
  /// 1-perp (tau = 1 path).
  std::optional<Index> kernel_index;
  /// Centered operator at tau = 1 lacks a full eigenbasis (Jordan block at 0).
  bool defective = false;
  /// Complex eigenvalues dropped by the general solver (each member of a
  /// conjugate pair counts once).
  std::size_t skipped_complex = 0;
  /// Real eigenvalues dropped because their vector failed the residual bound.
  std::size_t skipped_inaccurate = 0;

  Index size() const noexcept { return values.size(); }
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Throws
/// ContractError for non-symmetric input and ConvergenceError after 100
/// sweeps.
EigenSystem symmetric_eig(const OperatorMatrix& m);
EigenSystem symmetric_eig(const Matrix& m);

/// Eigenpairs of (I - tau 11^T/n) a.
///
/// tau = 0 is symmetric_eig(a). tau = 1 diagonalizes a restricted to 1-perp
/// and appends the kernel direction when it exists. Other tau go through the
/// general solver; with `require_real` any complex pair is a DomainError.
EigenSystem centered_eig(const OperatorMatrix& a, double tau, bool require_real = false);

/// Real eigenpairs of a general square matrix, residual-checked.
EigenSystem general_eig(const Matrix& m, bool require_real = false);

/// First k eigenvectors.
Matrix top_k(const EigenSystem& es, std::size_t k);

/// Singular values in descending order.
Vector singular_values(const Matrix& x);

/// Count of singular values above rel_tol * sigma_max * max(n, k).
std::size_t numerical_rank(const Matrix& x, double rel_tol = 1e-10);

/// (1/n) ||X - B B^T X||_F. Throws ContractError unless B^T B = I to 1e-8.
double subspace_distance(const Matrix& x, const Matrix& basis);
/// Same without the orthonormality check.
double subspace_distance_unchecked(const Matrix& x, const Matrix& basis);

/// Throws ContractError unless columns are orthonormal to `tol`.
void require_orthonormal(const Matrix& basis, double tol = 1e-8);

/// Orthonormal basis of Kr(A, X0) plus the data to expand vectors in the raw
/// generators A^{i-1} X0[:, j].
struct KrylovBasis {
  Matrix basis;
  Index r = 0;
  /// Upper triangular with generators[kept] = basis * R.
  Matrix R;
  struct Generator {
    Index power;   // i - 1
    Index column;  // j
  };
  std::vector<Generator> kept;

  /// Coefficients of the least-squares expansion of y in the kept generators.
  Vector expand(const Vector& y) const;
};

/// Modified Gram-Schmidt over A^{i-1} X0[:, j], outer loop over i, inner over
/// j. A vector is dropped when its residual falls below 1e-10 times the
/// largest generator norm seen so far.
KrylovBasis krylov_basis(const Matrix& a, const Matrix& x0);
KrylovBasis krylov_basis(const OperatorMatrix& a, const Matrix& x0);

}  // namespace oversmooth
