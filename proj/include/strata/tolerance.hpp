#pragma once

namespace strata {

/// Numerical thresholds shared by every rank and direct-sum decision.
struct ToleranceConfig {
  /// Singular values at or below rank_rel_tol * sigma_max count as zero.
  double rank_rel_tol = 1e-10;
  /// Largest acceptable condition number of a concatenated basis matrix
  /// before a family of subspaces stops counting as a direct sum.
  double membership_cond_max = 1e8;

  /// Throws Error(InvalidArgument) unless 0 < rank_rel_tol < 1 and
  /// membership_cond_max > 1.
  void validate() const;

  /// Defaults, with rank_rel_tol taken from STRATA_TOL when that variable is
  /// set to a valid number.
  static ToleranceConfig from_environment();
};

}  // namespace strata
