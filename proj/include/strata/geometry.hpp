#pragma once

#include <variant>
#include <vector>

#include "strata/subspace.hpp"

namespace strata {

/// (m + n - k) k, the dimension of the rank-k matrices among the n x m ones.
/// Throws OutOfRange unless 0 <= k <= min(m, n).
long dim_fk(int m, int n, int k);

/// An operator together with its rank, kernel and range.
struct StratumPoint {
  Matrix op;
  int k = 0;
  Subspace kernel;  // in R^cols
  Subspace range;   // in R^rows

  static StratumPoint at(const Matrix& op, const ToleranceConfig& tol = {});
};

/// Basis of {V : V N(X) ⊂ R(X)}, the tangent space of the rank-k stratum at X.
///
/// Elements are u v^T for orthonormal adapted bases: u over R(X) and v over
/// all of R^cols, or u over R(X)^⊥ and v over N(X)^⊥. The basis is therefore
/// orthonormal in the Frobenius inner product.
struct TangentBasis {
  StratumPoint at;
  std::vector<Matrix> basis;
  int dim = 0;

  /// Frobenius-orthogonal projection of v onto the span of the basis.
  Matrix project(const Matrix& v) const;
};

TangentBasis tangent_basis(const StratumPoint& x, const ToleranceConfig& tol = {});

/// max ||P_perp V b|| over orthonormal kernel basis columns b, P_perp the
/// orthogonal projector onto R(X)^⊥. Zero exactly on the tangent space.
double tangent_residual(const StratumPoint& x, const Matrix& v);
/// tangent_residual <= 1e-9 (1 + ||V||_max).
bool is_tangent(const StratumPoint& x, const Matrix& v);

/// Outcome of fitting log sigma_{k+1}(X + tV) against log t.
struct TangencyOrder {
  /// The curve stays on the stratum to machine precision at every grid point.
  bool exact = false;
  double slope = 0.0;
  int points_used = 0;
};

/// Log-spaced grid from 1e-1 down to 1e-4.
std::vector<double> default_tangency_grid(int points = 16);

/// Least-squares slope of log sigma_{k+1}(X + tV) versus log t over the grid
/// points where sigma_{k+1} exceeds 1e3 * eps * sigma_1. Throws
/// InvalidArgument for a degenerate grid (fewer than two points, a
/// non-positive t, or a span of less than two decades) or when only one
/// point is resolved above the noise floor.
TangencyOrder tangency_order(const StratumPoint& x, const Matrix& v,
                             const std::vector<double>& t_grid = default_tangency_grid());

}  // namespace strata
