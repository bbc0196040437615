#include "strata/path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "strata/error.hpp"

namespace strata {

namespace {

constexpr double kChainTolerance = 1e-10;
constexpr double kEndpointTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// cos/sin of pi t, exact at the quarter points the flip family passes through.
std::pair<double, double> half_turn(double t) {
  if (t == 0.0) return {1.0, 0.0};
  if (t == 0.5) return {0.0, 1.0};
  if (t == 1.0) return {-1.0, 0.0};
  const double angle = std::numbers::pi * t;
  return {std::cos(angle), std::sin(angle)};
}

Matrix sandwich(const Matrix& left, const Matrix& core, const Matrix& right) {
  if (left.size() == 0 && right.size() == 0) return core;
  if (left.size() == 0) return core * right;
  if (right.size() == 0) return left * core;
  return left * core * right;
}

Eigen::Index outer_rows(const Matrix& left, const Matrix& core) {
  return left.size() == 0 ? core.rows() : left.rows();
}

Eigen::Index outer_cols(const Matrix& core, const Matrix& right) {
  return right.size() == 0 ? core.cols() : right.cols();
}

}  // namespace

std::string_view PathSegment::kind() const {
  return std::visit(Overloaded{
                        [](const AffineSegment&) { return std::string_view("affine"); },
                        [](const LeftAffineSegment&) { return std::string_view("left-affine"); },
                        [](const RightAffineSegment&) { return std::string_view("right-affine"); },
                        [](const RotationFlipSegment&) { return std::string_view("rotation-flip"); },
                        [](const SpdLineSegment&) { return std::string_view("spd-line"); },
                        [](const RotationLogSegment&) { return std::string_view("rotation-log"); },
                        [](const ConstantSegment&) { return std::string_view("constant"); },
                    },
                    payload);
}

bool PathSegment::is_affine_kind() const {
  return std::holds_alternative<AffineSegment>(payload) || std::holds_alternative<LeftAffineSegment>(payload) ||
         std::holds_alternative<RightAffineSegment>(payload);
}

Matrix PathSegment::evaluate(double local_t) const {
  const double t = reversed ? 1.0 - local_t : local_t;
  return std::visit(
      Overloaded{
          [t](const AffineSegment& s) -> Matrix { return s.a + t * s.b; },
          [t](const LeftAffineSegment& s) -> Matrix { return (s.a + t * s.b) * s.c; },
          [t](const RightAffineSegment& s) -> Matrix { return s.c * (s.a + t * s.b); },
          [t](const RotationFlipSegment& s) -> Matrix {
            const auto [c, sn] = half_turn(t);
            const Vector moving = c * s.u + sn * s.w;
            if (s.side == FlipSide::Range) return s.base + moving * s.z.transpose();
            return s.base + s.z * moving.transpose();
          },
          [t](const SpdLineSegment& s) -> Matrix {
            const auto n = s.s.rows();
            const Matrix core = s.q * ((1.0 - t) * s.s + t * Matrix::Identity(n, n));
            return sandwich(s.left, core, s.right);
          },
          [t](const RotationLogSegment& s) -> Matrix {
            const double weight = 1.0 - t;
            const Matrix rotation =
                weight == 0.0 ? Matrix::Identity(s.k.rows(), s.k.cols()) : Matrix((weight * s.k).exp());
            return sandwich(s.left, rotation * s.m, s.right);
          },
          [](const ConstantSegment& s) -> Matrix { return s.a; },
      },
      payload);
}

Eigen::Index PathSegment::rows() const {
  return std::visit(Overloaded{
                        [](const AffineSegment& s) { return s.a.rows(); },
                        [](const LeftAffineSegment& s) { return s.a.rows(); },
                        [](const RightAffineSegment& s) { return s.c.rows(); },
                        [](const RotationFlipSegment& s) { return s.base.rows(); },
                        [](const SpdLineSegment& s) { return outer_rows(s.left, s.q); },
                        [](const RotationLogSegment& s) { return outer_rows(s.left, s.k); },
                        [](const ConstantSegment& s) { return s.a.rows(); },
                    },
                    payload);
}

Eigen::Index PathSegment::cols() const {
  return std::visit(Overloaded{
                        [](const AffineSegment& s) { return s.a.cols(); },
                        [](const LeftAffineSegment& s) { return s.c.cols(); },
                        [](const RightAffineSegment& s) { return s.a.cols(); },
                        [](const RotationFlipSegment& s) { return s.base.cols(); },
                        [](const SpdLineSegment& s) { return outer_cols(s.s, s.right); },
                        [](const RotationLogSegment& s) { return outer_cols(s.m, s.right); },
                        [](const ConstantSegment& s) { return s.a.cols(); },
                    },
                    payload);
}

OperatorPath::OperatorPath(std::vector<PathSegment> segments, Matrix declared_start, Matrix declared_end)
    : segments_(std::move(segments)), start_(std::move(declared_start)), end_(std::move(declared_end)) {
  if (segments_.empty()) throw Error(ErrorKind::InvalidArgument, "a path needs at least one segment");
  if (start_.rows() != end_.rows() || start_.cols() != end_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "declared endpoints have different shapes");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].rows() != start_.rows() || segments_[i].cols() != start_.cols()) {
      std::ostringstream os;
      os << "segment " << i << " is " << segments_[i].rows() << "x" << segments_[i].cols() << ", path is "
         << start_.rows() << "x" << start_.cols();
      throw Error(ErrorKind::DimensionMismatch, os.str());
    }
  }
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    if (!approx_equal(segments_[i].end(), segments_[i + 1].start(), kChainTolerance)) {
      std::ostringstream os;
      os << "segment " << i << " ends at a different operator than segment " << i + 1 << " starts (gap "
         << max_norm(segments_[i].end() - segments_[i + 1].start()) << ")";
      throw Error(ErrorKind::InternalConsistency, os.str());
    }
  }
  const auto [start_err, end_err] = endpoint_errors();
  if (start_err > kEndpointTolerance * (1.0 + max_norm(start_)) ||
      end_err > kEndpointTolerance * (1.0 + max_norm(end_))) {
    std::ostringstream os;
    os << "path misses its declared endpoints (errors " << start_err << ", " << end_err << ")";
    throw Error(ErrorKind::InternalConsistency, os.str());
  }
}

OperatorPath::OperatorPath(std::vector<PathSegment> segments)
    : OperatorPath(segments,
                   segments.empty() ? Matrix() : segments.front().start(),
                   segments.empty() ? Matrix() : segments.back().end()) {}

OperatorPath OperatorPath::constant(const Matrix& a) { return OperatorPath({PathSegment{ConstantSegment{a}}}, a, a); }

OperatorPath OperatorPath::concatenate(const std::vector<OperatorPath>& pieces) {
  if (pieces.empty()) throw Error(ErrorKind::InvalidArgument, "nothing to concatenate");
  std::vector<PathSegment> all;
  for (const auto& piece : pieces) all.insert(all.end(), piece.segments_.begin(), piece.segments_.end());
  return OperatorPath(std::move(all), pieces.front().start(), pieces.back().end());
}

SegmentTime OperatorPath::locate(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, "path parameter must lie in [0, 1], got " + std::to_string(t));
  }
  const auto count = segments_.size();
  const double scaled = t * static_cast<double>(count);
  const auto index = std::min(static_cast<std::size_t>(scaled), count - 1);
  return {index, std::clamp(scaled - static_cast<double>(index), 0.0, 1.0)};
}

double OperatorPath::global_time(std::size_t segment, double local_t) const {
  return (static_cast<double>(segment) + local_t) / static_cast<double>(segments_.size());
}

Matrix OperatorPath::eval(double t) const { return eval(locate(t)); }

Matrix OperatorPath::eval(const SegmentTime& at) const {
  if (at.segment >= segments_.size() || !(at.local_t >= 0.0 && at.local_t <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, "segment time out of range");
  }
  return segments_[at.segment].evaluate(at.local_t);
}

OperatorPath OperatorPath::reversed() const {
  std::vector<PathSegment> flipped(segments_.rbegin(), segments_.rend());
  for (auto& s : flipped) s.reversed = !s.reversed;
  return OperatorPath(std::move(flipped), end_, start_);
}

std::pair<double, double> OperatorPath::endpoint_errors() const {
  return {max_norm(segments_.front().start() - start_), max_norm(segments_.back().end() - end_)};
}

Matrix eval_path(const OperatorPath& p, double t) { return p.eval(t); }

}  // namespace strata
