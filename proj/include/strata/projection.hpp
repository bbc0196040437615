#pragma once

#include "strata/subspace.hpp"

namespace strata {

/// A linear map alpha from `domain` (E_*) into `codomain` (R), stored as its
/// matrix in the orthonormal bases of the two subspaces. Its graph
/// {x + alpha x : x in E_*} is another complement of R.
struct GraphParam {
  Subspace domain;
  Subspace codomain;
  Matrix coeff;  // codomain.dim() x domain.dim()

  /// Validates shapes and that domain ⊕ codomain is the whole space.
  static GraphParam make(Subspace domain, Subspace codomain, Matrix coeff, const ToleranceConfig& tol = {});

  /// alpha as an ambient n x n matrix, B_R * coeff * B_E*^T. It acts as alpha
  /// on E_* and vanishes on the orthogonal complement of E_*.
  Matrix ambient_operator() const;
  bool is_zero() const { return coeff.size() == 0 || max_norm(coeff) == 0.0; }
};

/// An oblique projector with range `part` and kernel `complement`.
struct Decomposition {
  Subspace part;
  Subspace complement;
  Matrix projector;

  /// The complementary projector, with range `complement` and kernel `part`.
  Matrix complementary() const;
};

/// Residuals behind the Decomposition invariants.
struct ProjectorCheck {
  double idempotency = 0.0;  // ||P^2 - P||_max
  double part_residual = 0.0;  // max ||P b - b||_max over basis columns of part
  double complement_residual = 0.0;  // max ||P c||_max over basis columns of complement
  bool ok = false;
};
ProjectorCheck check_projector(const Decomposition& d, double rel_tol = 1e-9);

/// P = [B_part B_comp] blockdiag(I, 0) [B_part B_comp]^{-1}.
/// Throws NotDirectSum (with the condition number) when part ⊕ complement
/// is not the whole space.
Decomposition oblique_projection(const Subspace& part, const Subspace& complement, const ToleranceConfig& tol = {});

/// The unique alpha: E_* -> R whose graph is E1. Requires E1 ⊕ R and
/// E_* ⊕ R to be the whole space (PreconditionFailed otherwise).
GraphParam alpha_from_complements(const Subspace& e1, const Subspace& e_star, const Subspace& r,
                                  const ToleranceConfig& tol = {});

/// {x + alpha x : x in domain}; dimension equals dim(domain).
Subspace graph_subspace(const GraphParam& g, const ToleranceConfig& tol = {});

/// Projector onto graph(alpha) along R via P + alpha P, where P projects onto
/// E_* along R. The result is cross-checked against an independent
/// oblique_projection of the graph; a discrepancy above 1e-9 (max-norm,
/// scaled by 1 + ||P||) raises InternalConsistency. Throws
/// PreconditionFailed when g's domain/codomain differ from base's split.
Decomposition projection_update(const Decomposition& base, const GraphParam& g, const ToleranceConfig& tol = {});

}  // namespace strata
