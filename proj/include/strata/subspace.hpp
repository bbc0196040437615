#pragma once

#include <span>
#include <utility>
#include <vector>

#include "strata/linalg.hpp"
#include "strata/tolerance.hpp"

namespace strata {

/// A linear subspace of R^n held through an orthonormal basis.
///
/// The basis is fixed at construction. Input columns that are already
/// orthonormal are kept verbatim; anything else is orthonormalized with a
/// Gram-Schmidt-equivalent QR (positive diagonal), so spans such as
/// span{(1,3)} keep their orientation. Coefficient matrices elsewhere in the
/// library (graph parameters, tangent coordinates) are expressed in these
/// bases. The zero subspace is an ordinary value with an n x 0 basis.
class Subspace {
 public:
  /// Zero subspace of R^n.
  explicit Subspace(int ambient_dim);

  /// Throws InvalidArgument if the columns are numerically dependent
  /// (smallest singular value <= rank_rel_tol * largest) or if there are
  /// more columns than rows.
  static Subspace from_basis(const Matrix& basis, const ToleranceConfig& tol = {});
  /// Wraps columns the caller already knows to be orthonormal; no checks.
  static Subspace adopt_orthonormal(int ambient_dim, Matrix basis) { return Subspace(ambient_dim, std::move(basis)); }
  /// Span of arbitrary (possibly dependent) columns.
  static Subspace span_of(const Matrix& vectors, const ToleranceConfig& tol = {});
  static Subspace zero(int ambient_dim) { return Subspace(ambient_dim); }
  static Subspace whole(int ambient_dim);
  /// span{e_i : i in indices} with zero-based indices.
  static Subspace coordinate(int ambient_dim, std::span<const int> indices);

  int ambient_dim() const noexcept { return ambient_dim_; }
  int dim() const noexcept { return static_cast<int>(basis_.cols()); }
  bool is_zero() const noexcept { return basis_.cols() == 0; }
  /// ambient_dim x dim, orthonormal columns.
  const Matrix& basis() const noexcept { return basis_; }
  /// Orthogonal projector onto the subspace.
  Matrix orthogonal_projector() const;

 private:
  Subspace(int ambient_dim, Matrix orthonormal_basis);

  int ambient_dim_;
  Matrix basis_;
};

struct DirectSumReport {
  bool is_direct = false;
  /// Condition number of the concatenated bases (+inf when singular or when
  /// the dimensions do not add up to a square matrix).
  double condition = 0.0;
  int dim_sum = 0;
  int ambient_dim = 0;

  explicit operator bool() const noexcept { return is_direct; }
};

int rank_of(const Matrix& a, const ToleranceConfig& tol = {});
Subspace kernel_basis(const Matrix& a, const ToleranceConfig& tol = {});
Subspace range_basis(const Matrix& a, const ToleranceConfig& tol = {});

/// True iff the dimensions add up to the ambient dimension and the
/// concatenated bases have condition number <= membership_cond_max.
/// Throws DimensionMismatch when ambient dimensions differ.
DirectSumReport is_direct_sum(std::span<const Subspace> parts, const ToleranceConfig& tol = {});
DirectSumReport is_direct_sum(const Subspace& a, const Subspace& b, const ToleranceConfig& tol = {});

Subspace orthogonal_complement(const Subspace& s);

/// (E1 + E2, E1 ∩ E2), computed from a single SVD so the dimension identity
/// dim E1 + dim E2 = dim(sum) + dim(intersection) holds exactly.
std::pair<Subspace, Subspace> sum_and_intersection(const Subspace& e1, const Subspace& e2,
                                                   const ToleranceConfig& tol = {});

/// A subspace R with R^n = E1 ⊕ R = E2 ⊕ R.
///
/// Both inputs are split as E_i = E_i* ⊕ (E1 ∩ E2). E1* and E2* are given
/// principal-vector bases (x_j, y_j) with x_j·y_j >= 0; the invertible map
/// x_j -> y_j defines H = span{x_j + y_j}. The result is H together with the
/// orthogonal complement of E1 + E2. Throws DimensionMismatch when
/// dim E1 != dim E2 or the ambient dimensions differ.
Subspace common_complement(const Subspace& e1, const Subspace& e2, const ToleranceConfig& tol = {});

/// Principal angles between equal-dimensional subspaces, ascending.
Vector principal_angles(const Subspace& a, const Subspace& b);
/// Largest principal angle; pi/2 when the dimensions differ, 0 for two zero
/// subspaces.
double max_principal_angle(const Subspace& a, const Subspace& b);
/// Basis-free equality: same dimension and largest principal angle < angle_tol.
bool same_subspace(const Subspace& a, const Subspace& b, double angle_tol = 1e-8);

/// Orthonormal basis of the part of `whole` orthogonal to `part`, for
/// part ⊆ whole.
Subspace relative_complement(const Subspace& whole, const Subspace& part, const ToleranceConfig& tol = {});

}  // namespace strata
