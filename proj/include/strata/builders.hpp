#pragma once

#include <optional>
#include <vector>

#include "strata/path.hpp"
#include "strata/projection.hpp"

namespace strata {

// Conventions: an operator R^cols -> R^rows is a rows x cols matrix; kernels
// live in R^cols and ranges in R^rows.

/// The two affine pieces P -> P + alpha P and (1 - 2t) P + (1 - t) alpha P,
/// where P projects onto E_* along R. Runs from P to -P. The second piece
/// leaves the set {T : R(T) ⊕ R = E, N(T) = R} at its own midpoint, which
/// audit_flip_path and certify_path report. E_* = {0} gives the constant
/// zero path. Throws PreconditionFailed when dim R = 0, when alpha does not
/// map E_* into R, or when alpha is zero while E_* is not.
OperatorPath literal_flip_path(const Subspace& e_star, const Subspace& r, const GraphParam& alpha,
                               const ToleranceConfig& tol = {});

/// Path from T to -T that keeps rank k: with T = sum sigma_i u_i v_i^T, each
/// segment turns one u_i (or v_i on the kernel side) into -u_i through a
/// fixed unit vector orthogonal to the range (row space). Without a side the
/// range is used whenever rows > k. Throws RankMismatch if rank_of(T) != k,
/// PreconditionFailed if the requested side has no room, and
/// NoComplementDirection when k = rows = cols.
OperatorPath corrected_flip_path(const Matrix& t, int k, std::optional<FlipSide> side = std::nullopt,
                                 const ToleranceConfig& tol = {});

/// t -> (P + t alpha P) T0 with P the projector onto F_* along N and alpha the
/// graph parameter of R(T0) over F_*. Runs from P T0 to T0, keeping the
/// kernel fixed while the range moves through F_t = graph(t alpha).
OperatorPath left_project_path(const Matrix& t0, const Subspace& f_star, const Subspace& n,
                               const ToleranceConfig& tol = {});

/// t -> T0 (Q - t alpha P) with Q the projector onto R0 along E_*, P the one
/// onto E_* along R0 and alpha the graph parameter of N(T0) over E_*. Runs
/// from T0 Q to T0, keeping the range fixed while the kernel moves.
OperatorPath right_project_path(const Matrix& t0, const Subspace& e_star, const Subspace& r0,
                                const ToleranceConfig& tol = {});

struct GlPath {
  OperatorPath path;
  int sign = 1;  // sign of det(A)
};

/// Path inside the invertible matrices from A to D = diag(sign det A, 1, ..., 1):
/// the polar factorization A = Q S gives an SPD line Q((1-t)S + tI) followed by
/// a geodesic exp((1-t)K) D in the orthogonal group, K a real skew logarithm of
/// Q D. Trivial pieces are omitted. Throws NumericallySingular when
/// sigma_min(A) <= rank_rel_tol * sigma_max(A).
GlPath gl_connect(const Matrix& a, const ToleranceConfig& tol = {});

/// Real skew-symmetric K with exp(K) = r for a rotation r (det +1), from the
/// real Schur form. Eigenvalue pairs at -1 get angle pi.
Matrix rotation_log(const Matrix& r);

/// Path from T2 to T1 inside the rank-k matrices of their shape. Throws
/// RankMismatch / DimensionMismatch on incompatible inputs and
/// DisconnectedComponents when k = rows = cols and det(T1), det(T2) differ
/// in sign.
OperatorPath connect_fk(const Matrix& t1, const Matrix& t2, const ToleranceConfig& tol = {});

/// Path from T2 to T1 keeping dim N(T) = kernel_dim and codim R(T) =
/// corank. Surjective inputs use the T2 ~ T2 T1^+ T1 route; otherwise the
/// connect_fk assembly is used. Throws PreconditionFailed when either input
/// is outside the stratum or when kernel_dim = corank = 0.
OperatorPath connect_phi(const Matrix& t1, const Matrix& t2, int kernel_dim, int corank,
                         const ToleranceConfig& tol = {});

/// Complement chains linking T0 to T_*:
///   kernel_complements[j] complements both kernel j and kernel j+1 of the
///   sequence N(T0), kernels..., N(T_*); range_complements likewise for
///   R(T0), ranges..., R(T_*).
struct ChainWitness {
  std::vector<Subspace> kernels;
  std::vector<Subspace> kernel_complements;
  std::vector<Subspace> ranges;
  std::vector<Subspace> range_complements;
};

/// Throws WitnessViolation naming the first link that fails.
void validate_witness(const Matrix& t0, const Matrix& t_star, const ChainWitness& w,
                      const ToleranceConfig& tol = {});

/// Path from T_* to T0 through the chain: T_* is first pulled onto the last
/// kernel and range of the chain, connected to T_{m+n} through the invertible
/// group (plus one flip when the determinant sign requires it), and then the
/// range chain and kernel chain are unwound back to T0.
OperatorPath chain_connect(const Matrix& t0, const Matrix& t_star, const ChainWitness& w,
                           const ToleranceConfig& tol = {});

/// Shortest witness: common complements of the two kernels and of the two
/// ranges, no intermediate subspaces. Throws RankMismatch.
ChainWitness discover_chain(const Matrix& t0, const Matrix& t_star, const ToleranceConfig& tol = {});

}  // namespace strata
