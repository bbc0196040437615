#include "strata/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strata/error.hpp"

namespace strata {

long dim_fk(int m, int n, int k) {
  if (m < 0 || n < 0 || k < 0 || k > std::min(m, n)) {
    throw Error(ErrorKind::OutOfRange, "rank " + std::to_string(k) + " is not available for " + std::to_string(n) +
                                           "x" + std::to_string(m) + " matrices");
  }
  return static_cast<long>(m + n - k) * k;
}

StratumPoint StratumPoint::at(const Matrix& op, const ToleranceConfig& tol) {
  return StratumPoint{op, rank_of(op, tol), kernel_basis(op, tol), range_basis(op, tol)};
}

Matrix TangentBasis::project(const Matrix& v) const {
  Matrix out = Matrix::Zero(v.rows(), v.cols());
  for (const auto& e : basis) out += (e.cwiseProduct(v).sum()) * e;
  return out;
}

TangentBasis tangent_basis(const StratumPoint& x, const ToleranceConfig& /*tol*/) {
  const Matrix& range = x.range.basis();                                  // rows x k
  const Matrix range_perp = orthogonal_complement(x.range).basis();      // rows x (rows - k)
  const Matrix coimage = orthogonal_complement(x.kernel).basis();        // cols x k
  const Matrix& kernel = x.kernel.basis();                                // cols x (cols - k)
  // Adapted column basis of R^cols: coimage first, then kernel.
  Matrix domain(x.op.cols(), coimage.cols() + kernel.cols());
  domain << coimage, kernel;

  TangentBasis out{x, {}, 0};
  for (Eigen::Index i = 0; i < range.cols(); ++i) {
    for (Eigen::Index j = 0; j < domain.cols(); ++j) out.basis.push_back(range.col(i) * domain.col(j).transpose());
  }
  for (Eigen::Index i = 0; i < range_perp.cols(); ++i) {
    for (Eigen::Index j = 0; j < coimage.cols(); ++j) {
      out.basis.push_back(range_perp.col(i) * coimage.col(j).transpose());
    }
  }
  out.dim = static_cast<int>(out.basis.size());
  return out;
}

double tangent_residual(const StratumPoint& x, const Matrix& v) {
  if (x.kernel.is_zero()) return 0.0;
  const Matrix image = v * x.kernel.basis();
  const Matrix outside = image - x.range.basis() * (x.range.basis().transpose() * image);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < outside.cols(); ++j) worst = std::max(worst, outside.col(j).norm());
  return worst;
}

bool is_tangent(const StratumPoint& x, const Matrix& v) {
  return tangent_residual(x, v) <= 1e-9 * (1.0 + max_norm(v));
}

std::vector<double> default_tangency_grid(int points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double exponent = -1.0 - 3.0 * static_cast<double>(i) / static_cast<double>(points - 1);
    grid.push_back(std::pow(10.0, exponent));
  }
  return grid;
}

TangencyOrder tangency_order(const StratumPoint& x, const Matrix& v, const std::vector<double>& t_grid) {
  if (v.rows() != x.op.rows() || v.cols() != x.op.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "direction and stratum point have different shapes");
  }
  if (t_grid.size() < 2) throw Error(ErrorKind::InvalidArgument, "tangency grid needs at least two points");
  const auto [lo, hi] = std::minmax_element(t_grid.begin(), t_grid.end());
  if (!(*lo > 0.0)) throw Error(ErrorKind::InvalidArgument, "tangency grid must be positive");
  if (std::log10(*hi / *lo) < 2.0 - 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "tangency grid must span at least two decades");
  }
  const auto next = static_cast<Eigen::Index>(x.k);
  if (next >= std::min(x.op.rows(), x.op.cols())) {
    // Full-rank stratum: it is open, every curve stays in it.
    return TangencyOrder{true, 0.0, 0};
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> log_t;
  std::vector<double> log_sigma;
  for (double t : t_grid) {
    const Vector s = singular_values(x.op + t * v);
    if (s(next) > 1e3 * eps * s(0)) {
      log_t.push_back(std::log(t));
      log_sigma.push_back(std::log(s(next)));
    }
  }
  if (log_t.empty()) return TangencyOrder{true, 0.0, 0};
  if (log_t.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "only one grid point resolves sigma_{k+1} above the noise floor");
  }
  const auto count = static_cast<double>(log_t.size());
  double mean_t = 0.0;
  double mean_s = 0.0;
  for (std::size_t i = 0; i < log_t.size(); ++i) {
    mean_t += log_t[i];
    mean_s += log_sigma[i];
  }
  mean_t /= count;
  mean_s /= count;
  double cov = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < log_t.size(); ++i) {
    cov += (log_t[i] - mean_t) * (log_sigma[i] - mean_s);
    var += (log_t[i] - mean_t) * (log_t[i] - mean_t);
  }
  return TangencyOrder{false, cov / var, static_cast<int>(log_t.size())};
}

}  // namespace strata
