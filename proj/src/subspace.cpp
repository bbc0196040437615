#include "strata/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "strata/error.hpp"

namespace strata {

namespace {

// QR-based orthonormalization with a positive R diagonal, i.e. the result
// Gram-Schmidt would give in exact arithmetic. Assumes independent columns.
Matrix orthonormalize(const Matrix& columns) {
  const auto n = columns.rows();
  const auto d = columns.cols();
  if (d == 0) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(columns);
  Matrix q = qr.householderQ() * Matrix::Identity(n, d);
  const Matrix r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

bool has_orthonormal_columns(const Matrix& b) {
  if (b.cols() == 0) return true;
  const Matrix gram = b.transpose() * b;
  return max_norm(gram - Matrix::Identity(b.cols(), b.cols())) <= 1e-13;
}

void require_same_ambient(const Subspace& a, const Subspace& b, const char* what) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": ambient dimensions " +
                                                  std::to_string(a.ambient_dim()) + " and " +
                                                  std::to_string(b.ambient_dim()) + " differ");
  }
}

}  // namespace

Subspace::Subspace(int ambient_dim) : ambient_dim_(ambient_dim), basis_(ambient_dim, 0) {
  if (ambient_dim <= 0) {
    throw Error(ErrorKind::InvalidArgument, "ambient dimension must be positive");
  }
}

Subspace::Subspace(int ambient_dim, Matrix orthonormal_basis)
    : ambient_dim_(ambient_dim), basis_(std::move(orthonormal_basis)) {}

Subspace Subspace::from_basis(const Matrix& basis, const ToleranceConfig& tol) {
  const auto n = static_cast<int>(basis.rows());
  if (n <= 0) throw Error(ErrorKind::InvalidArgument, "subspace basis needs at least one row");
  if (basis.cols() > basis.rows()) {
    throw Error(ErrorKind::InvalidArgument, "subspace basis has more columns than its ambient dimension");
  }
  if (!basis.allFinite()) throw Error(ErrorKind::InvalidArgument, "subspace basis has non-finite entries");
  if (basis.cols() == 0) return Subspace(n);
  if (has_orthonormal_columns(basis)) return Subspace::adopt_orthonormal(n, basis);
  const Vector s = singular_values(basis);
  if (s.minCoeff() <= tol.rank_rel_tol * s.maxCoeff()) {
    throw Error(ErrorKind::InvalidArgument, "subspace basis columns are linearly dependent");
  }
  return Subspace::adopt_orthonormal(n, orthonormalize(basis));
}

Subspace Subspace::span_of(const Matrix& vectors, const ToleranceConfig& tol) {
  if (vectors.rows() <= 0) throw Error(ErrorKind::InvalidArgument, "span of vectors with no rows");
  if (vectors.cols() == 0) return Subspace(static_cast<int>(vectors.rows()));
  return range_basis(vectors, tol);
}

Subspace Subspace::whole(int ambient_dim) {
  if (ambient_dim <= 0) throw Error(ErrorKind::InvalidArgument, "ambient dimension must be positive");
  return Subspace(ambient_dim, Matrix::Identity(ambient_dim, ambient_dim));
}

Subspace Subspace::coordinate(int ambient_dim, std::span<const int> indices) {
  Matrix b = Matrix::Zero(ambient_dim, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 0 || indices[j] >= ambient_dim) {
      throw Error(ErrorKind::InvalidArgument, "coordinate index out of range");
    }
    b(indices[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return from_basis(b);
}

Matrix Subspace::orthogonal_projector() const { return basis_ * basis_.transpose(); }

int rank_of(const Matrix& a, const ToleranceConfig& tol) { return numerical_rank(singular_values(a), tol); }

Subspace kernel_basis(const Matrix& a, const ToleranceConfig& tol) {
  if (a.cols() <= 0) throw Error(ErrorKind::InvalidArgument, "kernel of a matrix with no columns");
  const auto n = static_cast<int>(a.cols());
  if (a.rows() == 0) return Subspace::whole(n);
  const FullSvd svd = full_svd(a);
  const int r = numerical_rank(svd.sigma, tol);
  return Subspace::adopt_orthonormal(n, svd.v.rightCols(n - r));
}

Subspace range_basis(const Matrix& a, const ToleranceConfig& tol) {
  if (a.rows() <= 0) throw Error(ErrorKind::InvalidArgument, "range of a matrix with no rows");
  const auto n = static_cast<int>(a.rows());
  if (a.cols() == 0) return Subspace(n);
  const ThinSvd svd = thin_svd(a);
  const int r = numerical_rank(svd.sigma, tol);
  return Subspace::adopt_orthonormal(n, svd.u.leftCols(r));
}

DirectSumReport is_direct_sum(std::span<const Subspace> parts, const ToleranceConfig& tol) {
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "direct sum of an empty family");
  DirectSumReport report;
  report.ambient_dim = parts.front().ambient_dim();
  for (const auto& p : parts) {
    require_same_ambient(parts.front(), p, "is_direct_sum");
    report.dim_sum += p.dim();
  }
  if (report.dim_sum != report.ambient_dim) {
    report.condition = std::numeric_limits<double>::infinity();
    return report;
  }
  Matrix stacked(report.ambient_dim, report.dim_sum);
  Eigen::Index col = 0;
  for (const auto& p : parts) {
    stacked.middleCols(col, p.dim()) = p.basis();
    col += p.dim();
  }
  report.condition = condition_number(stacked);
  report.is_direct = report.condition <= tol.membership_cond_max;
  return report;
}

DirectSumReport is_direct_sum(const Subspace& a, const Subspace& b, const ToleranceConfig& tol) {
  const Subspace parts[] = {a, b};
  return is_direct_sum(parts, tol);
}

Subspace orthogonal_complement(const Subspace& s) {
  const int n = s.ambient_dim();
  if (s.is_zero()) return Subspace::whole(n);
  if (s.dim() == n) return Subspace(n);
  const FullSvd svd = full_svd(s.basis());
  return Subspace::from_basis(svd.u.rightCols(n - s.dim()));
}

std::pair<Subspace, Subspace> sum_and_intersection(const Subspace& e1, const Subspace& e2,
                                                   const ToleranceConfig& tol) {
  require_same_ambient(e1, e2, "sum_and_intersection");
  const int n = e1.ambient_dim();
  const auto d1 = e1.dim();
  const auto d2 = e2.dim();
  if (d1 + d2 == 0) return {Subspace(n), Subspace(n)};
  Matrix stacked(n, d1 + d2);
  stacked << e1.basis(), e2.basis();
  const FullSvd svd = full_svd(stacked);
  const int r = numerical_rank(svd.sigma, tol);
  Subspace sum = Subspace::from_basis(svd.u.leftCols(r));
  // Null vectors (a, b) of [B1 B2] give B1 a = -B2 b in the intersection; for
  // orthonormal B1, B2 these images are mutually orthogonal with norm 1/sqrt(2).
  const Matrix null = svd.v.rightCols(d1 + d2 - r);
  if (null.cols() == 0) return {std::move(sum), Subspace(n)};
  Matrix meet = orthonormalize(e1.basis() * null.topRows(d1));
  canonicalize_column_signs(meet);
  return {std::move(sum), Subspace::adopt_orthonormal(n, std::move(meet))};
}

Subspace relative_complement(const Subspace& whole, const Subspace& part, const ToleranceConfig& /*tol*/) {
  require_same_ambient(whole, part, "relative_complement");
  if (part.is_zero()) return whole;
  if (part.dim() >= whole.dim()) return Subspace(whole.ambient_dim());
  // Coordinates c (in whole's basis) orthogonal to part: null space of part^T W.
  const Matrix coupling = part.basis().transpose() * whole.basis();
  const FullSvd svd = full_svd(coupling);
  const Matrix coords = svd.v.rightCols(whole.dim() - part.dim());
  return Subspace::adopt_orthonormal(whole.ambient_dim(), whole.basis() * coords);
}

Subspace common_complement(const Subspace& e1, const Subspace& e2, const ToleranceConfig& tol) {
  require_same_ambient(e1, e2, "common_complement");
  if (e1.dim() != e2.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "common_complement needs equal dimensions, got " +
                                                  std::to_string(e1.dim()) + " and " + std::to_string(e2.dim()));
  }
  const int n = e1.ambient_dim();
  auto [sum, meet] = sum_and_intersection(e1, e2, tol);
  const Subspace outside = orthogonal_complement(sum);
  const Subspace e1_star = relative_complement(e1, meet, tol);
  const Subspace e2_star = relative_complement(e2, meet, tol);
  const auto p = std::min(e1_star.dim(), e2_star.dim());
  if (p == 0) return outside;

  // Principal vectors pair x_j with y_j at nonnegative cosine, so x_j + y_j
  // stays well away from both E1* and E2*.
  const FullSvd svd = full_svd(e1_star.basis().transpose() * e2_star.basis());
  const Matrix x = e1_star.basis() * svd.u.leftCols(p);
  const Matrix y = e2_star.basis() * svd.v.leftCols(p);
  Matrix r(n, p + outside.dim());
  r << x + y, outside.basis();
  return Subspace::from_basis(r, tol);
}

Vector principal_angles(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b, "principal_angles");
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "principal angles need equal dimensions");
  }
  const auto d = a.dim();
  if (d == 0) return Vector(0);
  // Cosines from A^T B (descending), sines from (I - AA^T)B (ascending after
  // reversal); use whichever is better conditioned for each angle.
  const Vector cosines = singular_values(a.basis().transpose() * b.basis());
  const Matrix residual = b.basis() - a.basis() * (a.basis().transpose() * b.basis());
  Vector sines = singular_values(residual);
  std::sort(sines.begin(), sines.end());
  Vector angles(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double s = std::min(1.0, sines(i));
    const double c = std::min(1.0, cosines(i));
    angles(i) = s < std::numbers::sqrt2 / 2 ? std::asin(s) : std::acos(c);
  }
  return angles;
}

double max_principal_angle(const Subspace& a, const Subspace& b) {
  require_same_ambient(a, b, "max_principal_angle");
  if (a.dim() != b.dim()) return std::numbers::pi / 2;
  if (a.dim() == 0) return 0.0;
  return principal_angles(a, b).maxCoeff();
}

bool same_subspace(const Subspace& a, const Subspace& b, double angle_tol) {
  return a.ambient_dim() == b.ambient_dim() && a.dim() == b.dim() && max_principal_angle(a, b) < angle_tol;
}

}  // namespace strata
