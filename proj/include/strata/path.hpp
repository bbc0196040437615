#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "strata/linalg.hpp"

namespace strata {

/// t -> a + t b
struct AffineSegment {
  Matrix a, b;
};

/// t -> (a + t b) c
struct LeftAffineSegment {
  Matrix a, b, c;
};

/// t -> c (a + t b)
struct RightAffineSegment {
  Matrix c, a, b;
};

enum class FlipSide { Range, Kernel };

/// Rotates one rank-one term through a direction outside the operator's
/// range (or row space) by half a turn:
///   range side:  t -> base + (cos(pi t) u + sin(pi t) w) z^T
///   kernel side: t -> base + z (cos(pi t) u + sin(pi t) w)^T
/// u and w are orthonormal, so at t = 1 the term u z^T becomes -u z^T.
struct RotationFlipSegment {
  Matrix base;
  Vector u, w, z;
  FlipSide side = FlipSide::Range;
};

/// t -> left * q ((1 - t) s + t I) * right, with s symmetric positive definite
/// and q orthogonal. Empty left/right factors mean identity.
struct SpdLineSegment {
  Matrix q, s;
  Matrix left, right;
};

/// t -> left * exp((1 - t) k) m * right, with k skew-symmetric. Empty
/// left/right factors mean identity.
struct RotationLogSegment {
  Matrix k, m;
  Matrix left, right;
};

struct ConstantSegment {
  Matrix a;
};

using SegmentPayload = std::variant<AffineSegment, LeftAffineSegment, RightAffineSegment, RotationFlipSegment,
                                    SpdLineSegment, RotationLogSegment, ConstantSegment>;

/// One closed-form piece of a path. A reversed segment is evaluated at 1 - t.
struct PathSegment {
  SegmentPayload payload;
  bool reversed = false;

  std::string_view kind() const;
  /// True for the affine, left-affine and right-affine kinds.
  bool is_affine_kind() const;
  Matrix evaluate(double local_t) const;
  Matrix start() const { return evaluate(0.0); }
  Matrix end() const { return evaluate(1.0); }
  Eigen::Index rows() const;
  Eigen::Index cols() const;
};

/// Where a global parameter lands: segment index and parameter inside it.
struct SegmentTime {
  std::size_t segment = 0;
  double local_t = 0.0;
};

/// A continuous family t in [0, 1] -> matrix, made of segments that each
/// occupy an equal share of [0, 1].
///
/// Construction checks that consecutive segments chain (end of one equals
/// the start of the next within 1e-10 relative max-norm) and that the path
/// reproduces the declared endpoints within 1e-9 (scaled by 1 + ||end||).
/// Violations raise InternalConsistency.
class OperatorPath {
 public:
  OperatorPath(std::vector<PathSegment> segments, Matrix declared_start, Matrix declared_end);
  /// Endpoints taken from the segments themselves.
  explicit OperatorPath(std::vector<PathSegment> segments);

  static OperatorPath constant(const Matrix& a);
  /// Segments of each path in order; every path must start where the
  /// previous one ends.
  static OperatorPath concatenate(const std::vector<OperatorPath>& pieces);

  const std::vector<PathSegment>& segments() const noexcept { return segments_; }
  std::size_t size() const noexcept { return segments_.size(); }
  Eigen::Index rows() const noexcept { return start_.rows(); }
  Eigen::Index cols() const noexcept { return start_.cols(); }
  const Matrix& start() const noexcept { return start_; }
  const Matrix& end() const noexcept { return end_; }

  /// Throws OutOfRange unless 0 <= t <= 1.
  Matrix eval(double t) const;
  Matrix eval(const SegmentTime& at) const;
  SegmentTime locate(double t) const;
  double global_time(std::size_t segment, double local_t) const;

  /// The same family traversed from end to start.
  OperatorPath reversed() const;

  /// Relative endpoint errors (start, end) as used by certificates.
  std::pair<double, double> endpoint_errors() const;

 private:
  std::vector<PathSegment> segments_;
  Matrix start_;
  Matrix end_;
};

Matrix eval_path(const OperatorPath& p, double t);

}  // namespace strata
