#include "strata/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strata/error.hpp"

namespace strata {

namespace {

constexpr double kMinConditioning = 1e-3;
constexpr int kMaxResamples = 10000;

Matrix random_rank_k(SeededUniform& rng, int rows, int cols, int k) {
  if (k == 0) return Matrix::Zero(rows, cols);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const Matrix left = rng.matrix(rows, k);
    const Matrix right = rng.matrix(k, cols);
    const Matrix product = left * right;
    const Vector s = singular_values(product);
    if (s(k - 1) >= kMinConditioning * s(0)) return product;
  }
  throw Error(ErrorKind::InternalConsistency, "could not draw a well-conditioned rank-k matrix");
}

Subspace random_subspace(SeededUniform& rng, int ambient, int dim) {
  if (dim == 0) return Subspace(ambient);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const Matrix basis = rng.matrix(ambient, dim);
    const Vector s = singular_values(basis);
    if (s(dim - 1) >= kMinConditioning * s(0)) return Subspace::from_basis(basis);
  }
  throw Error(ErrorKind::InternalConsistency, "could not draw a well-conditioned subspace basis");
}

}  // namespace

std::string_view to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::FkPair: return "fk-pair";
    case InstanceKind::PhiPair: return "phi-pair";
    case InstanceKind::SubspacePair: return "subspace-pair";
    case InstanceKind::Gl: return "gl";
  }
  return "unknown";
}

InstanceKind instance_kind_from_string(std::string_view name) {
  if (name == "fk-pair") return InstanceKind::FkPair;
  if (name == "phi-pair") return InstanceKind::PhiPair;
  if (name == "subspace-pair") return InstanceKind::SubspacePair;
  if (name == "gl") return InstanceKind::Gl;
  throw Error(ErrorKind::InvalidArgument, "unknown instance kind '" + std::string(name) + "'");
}

void InstanceSpec::validate() const {
  if (m <= 0 || n <= 0) throw Error(ErrorKind::InvalidArgument, "instance shapes must be positive");
  if (k < 0 || k > std::min(m, n)) {
    throw Error(ErrorKind::InvalidArgument, "rank " + std::to_string(k) + " is unreachable for " +
                                                std::to_string(n) + "x" + std::to_string(m) + " matrices");
  }
  if (kind == InstanceKind::Gl && m != n) throw Error(ErrorKind::InvalidArgument, "gl instances must be square");
  if (kind == InstanceKind::PhiPair && k == m && k == n) {
    throw Error(ErrorKind::InvalidArgument, "phi-pair needs a nontrivial kernel or cokernel (k < m or k < n)");
  }
}

double SeededUniform::next() {
  const std::uint64_t bits = engine_() >> 11;
  const double unit = static_cast<double>(bits) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

Matrix SeededUniform::matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = next();
  }
  return out;
}

int SeededUniform::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

Instance gen_instance(const InstanceSpec& spec) {
  spec.validate();
  SeededUniform rng(spec.seed);
  Instance out{spec, {}, {}};
  switch (spec.kind) {
    case InstanceKind::FkPair:
    case InstanceKind::PhiPair:
      out.matrices.push_back(random_rank_k(rng, spec.n, spec.m, spec.k));
      out.matrices.push_back(random_rank_k(rng, spec.n, spec.m, spec.k));
      break;
    case InstanceKind::Gl: out.matrices.push_back(random_rank_k(rng, spec.n, spec.m, spec.n)); break;
    case InstanceKind::SubspacePair:
      out.subspaces.push_back(random_subspace(rng, spec.m, spec.k));
      out.subspaces.push_back(random_subspace(rng, spec.m, spec.k));
      break;
  }
  return out;
}

FlipAuditInstance gen_flip_audit_instance(int dim, std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "the flip audit needs dim >= 2");
  SeededUniform rng(seed);
  const int d = rng.integer(1, dim - 1);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    Subspace e_star = random_subspace(rng, dim, d);
    Subspace r = random_subspace(rng, dim, dim - d);
    const auto split = is_direct_sum(e_star, r);
    Matrix coeff = rng.matrix(dim - d, d);
    if (!split || split.condition > 1e3 || max_norm(coeff) < 0.1) continue;
    GraphParam alpha = GraphParam::make(e_star, r, std::move(coeff));
    return FlipAuditInstance{std::move(e_star), std::move(r), std::move(alpha)};
  }
  throw Error(ErrorKind::InternalConsistency, "could not draw a well-conditioned flip audit instance");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Degenerate: return "degenerate";
  }
  return "unknown";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 1;
    case Verdict::Degenerate: return 2;
  }
  return 1;
}

std::vector<SegmentTime> sample_times(const OperatorPath& p, int grid) {
  if (grid < 2) throw Error(ErrorKind::InvalidArgument, "certification grid needs at least two points");
  struct Tagged {
    double t;
    SegmentTime at;
  };
  std::vector<Tagged> all;
  all.reserve(static_cast<std::size_t>(grid) + p.size());
  for (int j = 0; j < grid; ++j) {
    const double t = j == grid - 1 ? 1.0 : static_cast<double>(j) / static_cast<double>(grid - 1);
    all.push_back({t, p.locate(t)});
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.segments()[i].is_affine_kind()) all.push_back({p.global_time(i, 0.5), SegmentTime{i, 0.5}});
  }
  // Stable sort keeps the uniform sample first among exact ties; the forced
  // midpoint then replaces it so its local parameter is exactly 1/2.
  std::stable_sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.t < b.t; });
  std::vector<SegmentTime> out;
  std::vector<double> times;
  for (const auto& item : all) {
    if (!times.empty() && std::abs(item.t - times.back()) <= 1e-15) {
      if (item.at.local_t == 0.5) out.back() = item.at;
      continue;
    }
    times.push_back(item.t);
    out.push_back(item.at);
  }
  return out;
}

PathCertificate certify_path(const OperatorPath& p, int expected_k, int grid, const ToleranceConfig& tol,
                             const MembershipSpec& membership) {
  if (expected_k < 0) throw Error(ErrorKind::InvalidArgument, "expected rank must be nonnegative");
  PathCertificate cert;
  cert.grid_size = grid;
  cert.expected_k = expected_k;
  cert.tol = tol;
  const auto k = static_cast<Eigen::Index>(expected_k);
  const auto full = std::min(p.rows(), p.cols());

  bool all_pass = true;
  for (const SegmentTime& at : sample_times(p, grid)) {
    SampleRecord rec;
    rec.segment = at.segment;
    rec.local_t = at.local_t;
    rec.t = p.global_time(at.segment, at.local_t);
    const Matrix op = p.eval(at);
    const Vector s = singular_values(op);
    rec.rank = numerical_rank(s, tol);
    const double sigma_1 = s.size() > 0 ? s(0) : 0.0;
    rec.sigma_k = (k > 0 && k <= s.size()) ? s(k - 1) : 0.0;
    if (k < full) rec.sigma_k_plus_1 = s(k);
    const double floor = std::numeric_limits<double>::epsilon() * sigma_1;
    const double below = std::max(rec.sigma_k_plus_1.value_or(0.0), floor);
    rec.gap_ratio = k == 0 ? 0.0 : (below > 0.0 ? rec.sigma_k / below : std::numeric_limits<double>::infinity());
    rec.pass = rec.rank == expected_k && (k == 0 || rec.gap_ratio >= kMinGapRatio);

    if (!membership.empty()) {
      const Subspace range = range_basis(op, tol);
      const Subspace kernel = kernel_basis(op, tol);
      for (const auto& s_range : membership.range_complements) {
        const auto rep = is_direct_sum(range, s_range, tol);
        rec.range_conditions.push_back(rep.condition);
        rec.pass = rec.pass && rep.is_direct;
      }
      for (const auto& s_kernel : membership.kernel_complements) {
        const auto rep = is_direct_sum(kernel, s_kernel, tol);
        rec.kernel_conditions.push_back(rep.condition);
        rec.pass = rec.pass && rep.is_direct;
      }
      for (const auto& target : membership.kernel_equals) {
        const double angle = max_principal_angle(kernel, target);
        rec.kernel_angles.push_back(angle);
        rec.pass = rec.pass && angle < kSubspaceAngleTolerance;
      }
    }
    if (!rec.pass) cert.failures.push_back(rec.t);
    all_pass = all_pass && rec.pass;
    cert.samples.push_back(std::move(rec));
  }

  cert.endpoint_errors = p.endpoint_errors();
  const bool endpoints_ok = cert.endpoint_errors.first <= kEndpointTolerance * (1.0 + max_norm(p.start())) &&
                            cert.endpoint_errors.second <= kEndpointTolerance * (1.0 + max_norm(p.end()));
  if (expected_k == 0) {
    cert.verdict = Verdict::Degenerate;
  } else {
    cert.verdict = all_pass && endpoints_ok ? Verdict::Pass : Verdict::Fail;
  }
  return cert;
}

bool AuditReport::fails_at_flip_midpoint() const {
  return std::any_of(failures.begin(), failures.end(),
                     [](const SegmentTime& at) { return at.segment == 1 && at.local_t == 0.5; });
}

AuditReport audit_flip_path(const OperatorPath& p, const Subspace& complement, int grid, const ToleranceConfig& tol) {
  if (p.rows() != p.cols() || p.rows() != complement.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "audit_flip_path: path and complement live in different spaces");
  }
  AuditReport report;
  report.degenerate = max_norm(p.start()) == 0.0 && max_norm(p.end()) == 0.0;
  MembershipSpec membership;
  membership.range_complements.push_back(complement);
  membership.kernel_equals.push_back(complement);
  const int k = report.degenerate ? 0 : complement.ambient_dim() - complement.dim();
  report.certificate = certify_path(p, k, grid, tol, report.degenerate ? MembershipSpec{} : membership);
  for (const auto& rec : report.certificate.samples) {
    if (!rec.pass && !report.degenerate) report.failures.push_back(SegmentTime{rec.segment, rec.local_t});
  }
  return report;
}

}  // namespace strata
