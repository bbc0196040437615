#include "strata/projection.hpp"

#include <algorithm>
#include <sstream>

#include "strata/error.hpp"

namespace strata {

namespace {

constexpr double kUpdateTolerance = 1e-9;

std::string condition_message(const char* what, const DirectSumReport& r) {
  std::ostringstream os;
  os << what << " (dimensions sum to " << r.dim_sum << " in R^" << r.ambient_dim << ", condition number "
     << r.condition << ")";
  return os.str();
}

}  // namespace

GraphParam GraphParam::make(Subspace domain, Subspace codomain, Matrix coeff, const ToleranceConfig& tol) {
  if (domain.ambient_dim() != codomain.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "graph parameter domain and codomain live in different spaces");
  }
  if (coeff.rows() != codomain.dim() || coeff.cols() != domain.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "graph parameter coefficient must be dim(codomain) x dim(domain)");
  }
  if (const auto r = is_direct_sum(domain, codomain, tol); !r) {
    throw Error(ErrorKind::NotDirectSum, condition_message("graph parameter domain and codomain", r));
  }
  return GraphParam{std::move(domain), std::move(codomain), std::move(coeff)};
}

Matrix GraphParam::ambient_operator() const {
  const int n = domain.ambient_dim();
  if (domain.is_zero() || codomain.is_zero()) return Matrix::Zero(n, n);
  return codomain.basis() * coeff * domain.basis().transpose();
}

Matrix Decomposition::complementary() const {
  const auto n = projector.rows();
  return Matrix::Identity(n, n) - projector;
}

ProjectorCheck check_projector(const Decomposition& d, double rel_tol) {
  ProjectorCheck c;
  const Matrix& p = d.projector;
  const double scale = 1.0 + max_norm(p);
  c.idempotency = max_norm(p * p - p);
  if (!d.part.is_zero()) c.part_residual = max_norm(p * d.part.basis() - d.part.basis());
  if (!d.complement.is_zero()) c.complement_residual = max_norm(p * d.complement.basis());
  c.ok = c.idempotency <= rel_tol * scale && c.part_residual <= rel_tol * scale &&
         c.complement_residual <= rel_tol * scale;
  return c;
}

Decomposition oblique_projection(const Subspace& part, const Subspace& complement, const ToleranceConfig& tol) {
  const auto report = is_direct_sum(part, complement, tol);
  if (!report) throw Error(ErrorKind::NotDirectSum, condition_message("oblique_projection", report));
  const int n = part.ambient_dim();
  const auto d = part.dim();
  Matrix frame(n, n);
  frame << part.basis(), complement.basis();
  // P = B_part * (first d rows of frame^{-1}).
  const Matrix inverse = frame.fullPivLu().inverse();
  Matrix projector = part.basis() * inverse.topRows(d);
  return Decomposition{part, complement, std::move(projector)};
}

GraphParam alpha_from_complements(const Subspace& e1, const Subspace& e_star, const Subspace& r,
                                  const ToleranceConfig& tol) {
  if (const auto rep = is_direct_sum(e1, r, tol); !rep) {
    throw Error(ErrorKind::PreconditionFailed, condition_message("E1 does not complement R", rep));
  }
  if (const auto rep = is_direct_sum(e_star, r, tol); !rep) {
    throw Error(ErrorKind::PreconditionFailed, condition_message("E_* does not complement R", rep));
  }
  const int n = e1.ambient_dim();
  const auto ds = e_star.dim();
  const auto dr = r.dim();
  if (ds == 0) return GraphParam{e_star, r, Matrix(dr, 0)};
  // Split each basis vector of E1 as E_* part + R part: e = B_* a + B_R b.
  // Then alpha (B_* a) = B_R b, i.e. coeff * A = Bc with A square invertible.
  Matrix frame(n, n);
  frame << e_star.basis(), r.basis();
  const Matrix coords = frame.fullPivLu().solve(e1.basis());
  const Matrix a = coords.topRows(ds);
  const Matrix b = coords.bottomRows(dr);
  Matrix coeff = a.transpose().fullPivLu().solve(b.transpose()).transpose();
  return GraphParam{e_star, r, std::move(coeff)};
}

Subspace graph_subspace(const GraphParam& g, const ToleranceConfig& tol) {
  if (g.domain.is_zero()) return Subspace(g.domain.ambient_dim());
  const Matrix graph = g.domain.basis() + g.codomain.basis() * g.coeff;
  return Subspace::from_basis(graph, tol);
}

Decomposition projection_update(const Decomposition& base, const GraphParam& g, const ToleranceConfig& tol) {
  if (!same_subspace(base.part, g.domain) || !same_subspace(base.complement, g.codomain)) {
    throw Error(ErrorKind::PreconditionFailed,
                "projection_update: graph parameter must map the base part into the base complement");
  }
  const Matrix& p = base.projector;
  const Matrix alpha_p = g.ambient_operator() * p;
  Matrix updated = p + alpha_p;
  const Matrix updated_complementary = base.complementary() - alpha_p;

  const Subspace graph = graph_subspace(g, tol);
  const Decomposition independent = oblique_projection(graph, base.complement, tol);
  const double scale = 1.0 + max_norm(p);
  const double gap = max_norm(updated - independent.projector);
  const double gap_complementary = max_norm(updated_complementary - independent.complementary());
  if (std::max(gap, gap_complementary) > kUpdateTolerance * scale) {
    std::ostringstream os;
    os << "projection update disagrees with the direct oblique projection by " << std::max(gap, gap_complementary);
    throw Error(ErrorKind::InternalConsistency, os.str());
  }
  return Decomposition{graph, base.complement, std::move(updated)};
}

}  // namespace strata
