#include "strata/linalg.hpp"

#include <cmath>
#include <limits>

namespace strata {

double max_norm(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector(0);
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

namespace {

// Index of the entry deciding a column's sign.
Eigen::Index sign_pivot(const Eigen::Ref<const Vector>& col) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    // Entries within a relative hair of each other count as ties so that the
    // first one wins deterministically.
    const double v = std::abs(col(i));
    if (v > best_abs * (1.0 + 1e-12) + 1e-300) {
      best_abs = v;
      best = i;
    }
  }
  return best;
}

}  // namespace

void canonicalize_column_signs(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    if (columns.rows() == 0) return;
    const auto p = sign_pivot(columns.col(j));
    if (columns(p, j) < 0.0) columns.col(j) *= -1.0;
  }
}

ThinSvd thin_svd(const Matrix& a) {
  ThinSvd out;
  const auto p = std::min(a.rows(), a.cols());
  if (a.size() == 0) {
    out.u = Matrix(a.rows(), 0);
    out.v = Matrix(a.cols(), 0);
    out.sigma = Vector(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU().leftCols(p);
  out.v = svd.matrixV().leftCols(p);
  out.sigma = svd.singularValues();
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto piv = sign_pivot(out.u.col(j));
    if (out.u(piv, j) < 0.0) {
      out.u.col(j) *= -1.0;
      out.v.col(j) *= -1.0;
    }
  }
  return out;
}

FullSvd full_svd(const Matrix& a) {
  FullSvd out;
  const auto p = std::min(a.rows(), a.cols());
  if (a.size() == 0) {
    out.u = Matrix::Identity(a.rows(), a.rows());
    out.v = Matrix::Identity(a.cols(), a.cols());
    out.sigma = Vector(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.sigma = svd.singularValues();
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto piv = sign_pivot(out.u.col(j));
    if (out.u(piv, j) < 0.0) {
      out.u.col(j) *= -1.0;
      out.v.col(j) *= -1.0;
    }
  }
  for (Eigen::Index j = p; j < out.u.cols(); ++j) {
    const auto piv = sign_pivot(out.u.col(j));
    if (out.u(piv, j) < 0.0) out.u.col(j) *= -1.0;
  }
  for (Eigen::Index j = p; j < out.v.cols(); ++j) {
    const auto piv = sign_pivot(out.v.col(j));
    if (out.v(piv, j) < 0.0) out.v.col(j) *= -1.0;
  }
  return out;
}

int numerical_rank(const Vector& sigma, const ToleranceConfig& tol) {
  if (sigma.size() == 0) return 0;
  const double smax = sigma.maxCoeff();
  if (smax <= 0.0) return 0;
  const double cutoff = tol.rank_rel_tol * smax;
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++r;
  }
  return r;
}

double condition_number(const Matrix& square) {
  if (square.size() == 0) return 1.0;
  const Vector s = singular_values(square);
  const double smin = s.minCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s.maxCoeff() / smin;
}

bool approx_equal(const Matrix& a, const Matrix& b, double rel_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_norm(a - b) <= rel_tol * (1.0 + std::max(max_norm(a), max_norm(b)));
}

}  // namespace strata
