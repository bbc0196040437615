#pragma once

#include <Eigen/Dense>

#include "strata/tolerance.hpp"

namespace strata {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest absolute entry; 0 for an empty matrix.
double max_norm(const Matrix& a);

/// Singular values in decreasing order (empty for an empty matrix).
Vector singular_values(const Matrix& a);

/// Thin SVD with a deterministic sign convention: for every singular pair the
/// entry of largest magnitude in the left vector is positive.
struct ThinSvd {
  Matrix u;  // rows x p
  Vector sigma;
  Matrix v;  // cols x p
};
ThinSvd thin_svd(const Matrix& a);

/// Full SVD (square U and V) with the same sign convention applied to the
/// leading min(rows, cols) pairs and to every trailing null-space column.
struct FullSvd {
  Matrix u;  // rows x rows
  Vector sigma;
  Matrix v;  // cols x cols
};
FullSvd full_svd(const Matrix& a);

/// Flip the sign of each column so that its largest-magnitude entry is
/// positive (first such entry on ties).
void canonicalize_column_signs(Matrix& columns);

/// Number of singular values above tol.rank_rel_tol * sigma_max.
int numerical_rank(const Vector& sigma, const ToleranceConfig& tol);

/// sigma_max / sigma_min of a square matrix; +inf when singular, 1 when empty.
double condition_number(const Matrix& square);

/// Relative distance test used for endpoint and chaining checks.
bool approx_equal(const Matrix& a, const Matrix& b, double rel_tol);

}  // namespace strata
