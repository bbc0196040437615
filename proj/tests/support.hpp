#pragma once

// Independent oracles shared by the test binaries. Nothing here calls the
// SVD-based helpers of the library: ranks come from full-pivot LU and
// projectors from a direct linear solve.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace testing_support {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = uniform();
    return out;
  }
  /// rows x cols with orthonormal columns (cols <= rows).
  Matrix orthonormal(Eigen::Index rows, Eigen::Index cols) {
    if (cols == 0) return Matrix(rows, 0);
    Eigen::HouseholderQR<Matrix> qr(matrix(rows, cols));
    return qr.householderQ() * Matrix::Identity(rows, cols);
  }
  /// Rank-k rows x cols matrix with nonzero singular values in [0.5, 2].
  Matrix rank_k(Eigen::Index rows, Eigen::Index cols, Eigen::Index k) {
    Matrix s = Matrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) s(i, i) = uniform(0.5, 2.0);
    return orthonormal(rows, k) * s * orthonormal(cols, k).transpose();
  }

 private:
  std::mt19937_64 engine_;
};

inline int lu_rank(const Matrix& a, double threshold = 1e-9) {
  if (a.size() == 0) return 0;
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(threshold);
  return static_cast<int>(lu.rank());
}

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// Projector with range span(part) and kernel span(comp), from the defining
/// equations P [part comp] = [part 0].
inline Matrix oblique_oracle(const Matrix& part, const Matrix& comp) {
  const Eigen::Index n = part.rows();
  Matrix frame(n, part.cols() + comp.cols());
  frame << part, comp;
  Matrix image = Matrix::Zero(n, frame.cols());
  image.leftCols(part.cols()) = part;
  // P frame = image  <=>  frame^T P^T = image^T
  return frame.transpose().partialPivLu().solve(image.transpose()).transpose();
}

/// True when the columns of a and b together form an invertible square matrix.
inline bool lu_direct_sum(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() + b.cols()) return false;
  Matrix frame(a.rows(), a.cols() + b.cols());
  frame << a, b;
  return lu_rank(frame) == frame.cols();
}

}  // namespace testing_support
