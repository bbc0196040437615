#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "strata/path.hpp"
#include "strata/projection.hpp"
#include "strata/subspace.hpp"

namespace strata {

enum class InstanceKind { FkPair, PhiPair, SubspacePair, Gl };

std::string_view to_string(InstanceKind kind);
InstanceKind instance_kind_from_string(std::string_view name);

/// Random instance request. Matrices are n x m (maps R^m -> R^n); subspace
/// pairs live in R^m.
struct InstanceSpec {
  int m = 0;
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  InstanceKind kind = InstanceKind::FkPair;

  /// Throws InvalidArgument for non-positive shapes, k outside [0, min(m, n)],
  /// a non-square gl request, or a phi-pair with k = m = n.
  void validate() const;
};

struct Instance {
  InstanceSpec spec;
  /// fk-pair / phi-pair: {T1, T2}; gl: {A}.
  std::vector<Matrix> matrices;
  /// subspace-pair: {E1, E2}.
  std::vector<Subspace> subspaces;
};

/// Uniform(-1, 1) doubles from a 64-bit Mersenne twister, using only the
/// engine's exactly specified output so streams agree across platforms.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : engine_(seed) {}
  double next();
  /// rows x cols, filled row by row.
  Matrix matrix(Eigen::Index rows, Eigen::Index cols);
  /// Integer in [lo, hi].
  int integer(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

/// Deterministic in the seed. Pairs are products of full-rank uniform
/// factors, resampled until sigma_k / sigma_1 >= 1e-3 (sigma_min / sigma_1
/// for gl, smallest/largest basis singular value for subspace pairs).
Instance gen_instance(const InstanceSpec& spec);

/// A split E_* ⊕ R of R^dim with a nonzero graph parameter, the input of the
/// literal flip path. dim E_* is drawn from [1, dim - 1] and the split is
/// resampled until its concatenated basis has condition number <= 1e3.
/// Throws InvalidArgument for dim < 2.
struct FlipAuditInstance {
  Subspace e_star;
  Subspace r;
  GraphParam alpha;
};

FlipAuditInstance gen_flip_audit_instance(int dim, std::uint64_t seed);

/// Subspaces a certified path must stay in direct sum with (or equal to).
struct MembershipSpec {
  std::vector<Subspace> range_complements;   // R(path(t)) ⊕ S = R^rows
  std::vector<Subspace> kernel_complements;  // N(path(t)) ⊕ S = R^cols
  std::vector<Subspace> kernel_equals;       // N(path(t)) = S

  bool empty() const {
    return range_complements.empty() && kernel_complements.empty() && kernel_equals.empty();
  }
};

struct SampleRecord {
  double t = 0.0;
  std::size_t segment = 0;
  double local_t = 0.0;
  int rank = 0;
  double sigma_k = 0.0;
  std::optional<double> sigma_k_plus_1;  // absent when k = min(rows, cols)
  double gap_ratio = 0.0;
  std::vector<double> range_conditions;
  std::vector<double> kernel_conditions;
  std::vector<double> kernel_angles;
  bool pass = false;
};

enum class Verdict { Pass, Fail, Degenerate };
std::string_view to_string(Verdict v);
/// 0 pass, 1 fail, 2 degenerate.
int exit_code(Verdict v);

struct PathCertificate {
  std::optional<InstanceSpec> instance;
  int grid_size = 0;
  int expected_k = 0;
  ToleranceConfig tol;
  std::vector<SampleRecord> samples;
  std::pair<double, double> endpoint_errors{0.0, 0.0};
  Verdict verdict = Verdict::Fail;
  std::vector<double> failures;
};

/// Minimum sigma_k / sigma_{k+1} for a sample to count as rank k.
inline constexpr double kMinGapRatio = 1e6;
/// Endpoint errors must stay below this times (1 + ||endpoint||_max).
inline constexpr double kEndpointTolerance = 1e-9;
/// Largest principal angle accepted for kernel equality.
inline constexpr double kSubspaceAngleTolerance = 1e-8;

/// `grid` uniform global times including both ends, plus the internal
/// midpoint of every affine-kind segment, sorted and deduplicated.
std::vector<SegmentTime> sample_times(const OperatorPath& p, int grid);

/// Samples the path and checks rank k through the sigma gap, the endpoint
/// errors and any membership conditions. Failures land in the certificate.
/// Throws InvalidArgument only for grid < 2 or a negative k. The verdict is
/// degenerate for k = 0.
PathCertificate certify_path(const OperatorPath& p, int expected_k, int grid, const ToleranceConfig& tol = {},
                             const MembershipSpec& membership = {});

/// Pointwise check of the literal flip path against the set
/// {T : R(T) ⊕ R = E and N(T) = R}.
struct AuditReport {
  PathCertificate certificate;
  /// E_* = {0}: the path is the zero operator, which the set excludes.
  bool degenerate = false;
  /// Failing samples as (segment, parameter inside that segment).
  std::vector<SegmentTime> failures;

  /// A failure at parameter 1/2 of the second (printed flip) segment.
  bool fails_at_flip_midpoint() const;
};

AuditReport audit_flip_path(const OperatorPath& p, const Subspace& complement, int grid,
                            const ToleranceConfig& tol = {});

}  // namespace strata
