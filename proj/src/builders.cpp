#include "strata/builders.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "strata/error.hpp"

namespace strata {

namespace {

// Below this (relative) size a coefficient is treated as exactly zero when
// deciding whether a stage degenerates to a constant.
constexpr double kNegligible = 1e-14;

bool negligible(const Matrix& term, const Matrix& reference) {
  return max_norm(term) <= kNegligible * (1.0 + max_norm(reference));
}

bool all_constant(const OperatorPath& p) {
  for (const auto& s : p.segments()) {
    if (!std::holds_alternative<ConstantSegment>(s.payload)) return false;
  }
  return true;
}

// Collects stages, dropping the ones that never move.
class Assembly {
 public:
  void add(const OperatorPath& piece) {
    if (all_constant(piece)) return;
    pieces_.push_back(piece);
  }
  OperatorPath finish(const Matrix& start, const Matrix& end) const {
    if (pieces_.empty()) return OperatorPath({PathSegment{ConstantSegment{end}}}, start, end);
    std::vector<PathSegment> all;
    for (const auto& p : pieces_) all.insert(all.end(), p.segments().begin(), p.segments().end());
    return OperatorPath(std::move(all), start, end);
  }

 private:
  std::vector<OperatorPath> pieces_;
};

void require_shape(const Subspace& s, Eigen::Index ambient, const char* what) {
  if (s.ambient_dim() != ambient) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " lives in R^" + std::to_string(s.ambient_dim()) +
                                                  ", expected R^" + std::to_string(ambient));
  }
}

int sign_of_det(const Matrix& q) { return q.fullPivLu().determinant() > 0.0 ? 1 : -1; }

struct GlPieces {
  std::vector<PathSegment> segments;
  int sign = 1;
};

// left * G(t) * right where G runs from g to D inside the invertible group.
GlPieces gl_segments(const Matrix& g, const Matrix& left, const Matrix& right, const ToleranceConfig& tol) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "gl_connect needs a nonempty square matrix");
  }
  const ThinSvd svd = thin_svd(g);
  const double smax = svd.sigma.maxCoeff();
  const double smin = svd.sigma.minCoeff();
  if (!(smax > 0.0) || smin <= tol.rank_rel_tol * smax) {
    std::ostringstream os;
    os << "smallest singular value " << smin << " against largest " << smax;
    throw Error(ErrorKind::NumericallySingular, os.str());
  }
  const auto n = g.rows();
  const Matrix q = svd.u * svd.v.transpose();
  Matrix s = svd.v * svd.sigma.asDiagonal() * svd.v.transpose();
  s = 0.5 * (s + s.transpose());

  GlPieces out;
  out.sign = sign_of_det(q);
  Matrix target = Matrix::Identity(n, n);
  target(0, 0) = out.sign;

  if (!negligible(s - Matrix::Identity(n, n), s)) {
    out.segments.push_back(PathSegment{SpdLineSegment{q, s, left, right}});
  }
  if (!negligible(q - target, q)) {
    const Matrix k = rotation_log(q * target);
    out.segments.push_back(PathSegment{RotationLogSegment{k, target, left, right}});
  }
  return out;
}

// Half-turn of one rank-one term of frame * coords, undoing the sign that
// D = diag(-1, 1, ..., 1) leaves on the first direction. Runs from
// frame * D * coords to frame * coords.
PathSegment sign_flip(const Matrix& frame, const Matrix& coords, const ToleranceConfig& tol) {
  const auto rows = frame.rows();
  const auto cols = coords.cols();
  const auto k = frame.cols();
  const Matrix target = frame * coords;
  const Vector u1 = frame.col(0);
  const Vector c1 = coords.row(0).transpose();
  const Matrix base = target - u1 * c1.transpose();
  if (rows > k) {
    const Subspace outside = orthogonal_complement(Subspace::from_basis(frame, tol));
    return PathSegment{RotationFlipSegment{base, -u1, outside.basis().col(0), c1, FlipSide::Range}};
  }
  if (cols > k) {
    const double nu = c1.norm();
    const Subspace kernel = kernel_basis(coords, tol);
    return PathSegment{RotationFlipSegment{base, -c1 / nu, kernel.basis().col(0), nu * u1, FlipSide::Kernel}};
  }
  throw Error(ErrorKind::DisconnectedComponents,
              "the invertible factor has negative determinant and the operator is square of full rank, so no "
              "complement direction exists to absorb the sign");
}

// From frame * g * coords to frame * coords, staying at rank k: GL path of
// the middle factor, then one flip if det(g) < 0.
OperatorPath invertible_factor_path(const Matrix& frame, const Matrix& g, const Matrix& coords,
                                    const ToleranceConfig& tol) {
  const Matrix start = frame * g * coords;
  const Matrix end = frame * coords;
  GlPieces gl = gl_segments(g, frame, coords, tol);
  if (gl.sign < 0) gl.segments.push_back(sign_flip(frame, coords, tol));
  if (gl.segments.empty()) return OperatorPath({PathSegment{ConstantSegment{end}}}, start, end);
  return OperatorPath(std::move(gl.segments), start, end);
}

// Right inverse of op restricted to `domain` (which must complement N(op)),
// expressed against the orthonormal frame of R(op): op * X = frame.
Matrix restricted_inverse(const Matrix& op, const Subspace& domain, const Matrix& frame) {
  const Matrix block = frame.transpose() * op * domain.basis();
  return domain.basis() * block.fullPivLu().inverse();
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "operators have different shapes");
  }
}

bool same_operator(const Matrix& a, const Matrix& b) {
  return max_norm(a - b) <= 1e-15 * (1.0 + std::max(max_norm(a), max_norm(b)));
}

std::string link_failure(const char* chain, const char* complement, std::size_t idx, const std::string& lhs,
                         const DirectSumReport& rep) {
  std::ostringstream os;
  os << chain << ": " << complement << "_" << idx << " does not complement " << lhs << " (condition number "
     << rep.condition << ", dimensions sum to " << rep.dim_sum << " in R^" << rep.ambient_dim << ")";
  return os.str();
}

}  // namespace

OperatorPath literal_flip_path(const Subspace& e_star, const Subspace& r, const GraphParam& alpha,
                               const ToleranceConfig& tol) {
  if (r.is_zero()) throw Error(ErrorKind::PreconditionFailed, "literal_flip_path needs dim R > 0");
  const int n = e_star.ambient_dim();
  if (e_star.is_zero()) return OperatorPath::constant(Matrix::Zero(n, n));
  if (!same_subspace(alpha.domain, e_star) || !same_subspace(alpha.codomain, r)) {
    throw Error(ErrorKind::PreconditionFailed, "alpha must map E_* into R");
  }
  if (alpha.is_zero()) throw Error(ErrorKind::PreconditionFailed, "alpha must be nonzero when E_* is nonzero");
  const Matrix p = oblique_projection(e_star, r, tol).projector;
  const Matrix alpha_p = alpha.ambient_operator() * p;
  std::vector<PathSegment> segments{
      PathSegment{AffineSegment{p, alpha_p}},
      PathSegment{AffineSegment{p + alpha_p, -2.0 * p - alpha_p}},
  };
  return OperatorPath(std::move(segments), p, -p);
}

OperatorPath corrected_flip_path(const Matrix& t, int k, std::optional<FlipSide> side, const ToleranceConfig& tol) {
  const int rank = rank_of(t, tol);
  if (rank != k) {
    throw Error(ErrorKind::RankMismatch,
                "corrected_flip_path: operator has rank " + std::to_string(rank) + ", expected " + std::to_string(k));
  }
  if (k == 0) return OperatorPath::constant(t);
  const bool range_room = t.rows() > k;
  const bool kernel_room = t.cols() > k;
  if (!range_room && !kernel_room) {
    throw Error(ErrorKind::NoComplementDirection,
                "an invertible square operator cannot be joined to its negative among invertible operators");
  }
  const FlipSide chosen = side.value_or(range_room ? FlipSide::Range : FlipSide::Kernel);
  if ((chosen == FlipSide::Range && !range_room) || (chosen == FlipSide::Kernel && !kernel_room)) {
    throw Error(ErrorKind::PreconditionFailed, "the requested flip side has no complement direction");
  }

  const ThinSvd svd = thin_svd(t);
  const Vector w = chosen == FlipSide::Range ? orthogonal_complement(range_basis(t, tol)).basis().col(0)
                                             : kernel_basis(t, tol).basis().col(0);
  std::vector<PathSegment> segments;
  Matrix current = t;
  for (int i = 0; i < k; ++i) {
    const Vector left = svd.u.col(i);
    const Vector right = svd.v.col(i);
    const double sigma = svd.sigma(i);
    const Matrix term = sigma * left * right.transpose();
    const Matrix base = current - term;
    if (chosen == FlipSide::Range) {
      segments.push_back(PathSegment{RotationFlipSegment{base, left, w, sigma * right, FlipSide::Range}});
    } else {
      segments.push_back(PathSegment{RotationFlipSegment{base, right, w, sigma * left, FlipSide::Kernel}});
    }
    current = base - term;
  }
  return OperatorPath(std::move(segments), t, -t);
}

OperatorPath left_project_path(const Matrix& t0, const Subspace& f_star, const Subspace& n,
                               const ToleranceConfig& tol) {
  require_shape(f_star, t0.rows(), "F_*");
  require_shape(n, t0.rows(), "N");
  if (n.is_zero()) throw Error(ErrorKind::PreconditionFailed, "left_project_path needs dim N > 0");
  const Subspace range = range_basis(t0, tol);
  const GraphParam alpha = alpha_from_complements(range, f_star, n, tol);
  const Matrix p = oblique_projection(f_star, n, tol).projector;
  const Matrix alpha_p = alpha.ambient_operator() * p;
  const Matrix start = p * t0;
  if (negligible(alpha_p, p)) return OperatorPath({PathSegment{ConstantSegment{t0}}}, start, t0);
  return OperatorPath({PathSegment{LeftAffineSegment{p, alpha_p, t0}}}, start, t0);
}

OperatorPath right_project_path(const Matrix& t0, const Subspace& e_star, const Subspace& r0,
                                const ToleranceConfig& tol) {
  require_shape(e_star, t0.cols(), "E_*");
  require_shape(r0, t0.cols(), "R0");
  if (r0.is_zero()) throw Error(ErrorKind::PreconditionFailed, "right_project_path needs dim R0 > 0");
  const Subspace kernel = kernel_basis(t0, tol);
  const GraphParam alpha = alpha_from_complements(kernel, e_star, r0, tol);
  const Matrix onto_r0 = oblique_projection(r0, e_star, tol).projector;
  const Matrix onto_e_star = Matrix::Identity(t0.cols(), t0.cols()) - onto_r0;
  const Matrix slope = -alpha.ambient_operator() * onto_e_star;
  const Matrix start = t0 * onto_r0;
  if (negligible(slope, onto_r0)) return OperatorPath({PathSegment{ConstantSegment{t0}}}, start, t0);
  return OperatorPath({PathSegment{RightAffineSegment{t0, onto_r0, slope}}}, start, t0);
}

Matrix rotation_log(const Matrix& r) {
  const auto n = r.rows();
  if (n != r.cols()) throw Error(ErrorKind::DimensionMismatch, "rotation_log needs a square matrix");
  Eigen::RealSchur<Matrix> schur(r);
  const Matrix& tri = schur.matrixT();
  const Matrix& z = schur.matrixU();
  Matrix log_tri = Matrix::Zero(n, n);
  std::vector<Eigen::Index> at_minus_one;
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && std::abs(tri(i + 1, i)) > 1e-13) {
      // Normal 2x2 block [[c, -s], [s, c]] up to rounding.
      const double cosine = 0.5 * (tri(i, i) + tri(i + 1, i + 1));
      const double sine = 0.5 * (tri(i + 1, i) - tri(i, i + 1));
      const double angle = std::atan2(sine, cosine);
      log_tri(i, i + 1) = -angle;
      log_tri(i + 1, i) = angle;
      i += 2;
    } else {
      if (tri(i, i) < 0.0) at_minus_one.push_back(i);
      i += 1;
    }
  }
  if (at_minus_one.size() % 2 != 0) {
    throw Error(ErrorKind::InternalConsistency, "rotation_log: matrix has determinant -1");
  }
  for (std::size_t j = 0; j < at_minus_one.size(); j += 2) {
    const auto a = at_minus_one[j];
    const auto b = at_minus_one[j + 1];
    log_tri(a, b) = -std::numbers::pi;
    log_tri(b, a) = std::numbers::pi;
  }
  Matrix k = z * log_tri * z.transpose();
  k = 0.5 * (k - k.transpose());
  const Matrix check = k.exp();
  if (max_norm(check - r) > 1e-10) {
    std::ostringstream os;
    os << "rotation_log: exp(log R) misses R by " << max_norm(check - r);
    throw Error(ErrorKind::InternalConsistency, os.str());
  }
  return k;
}

GlPath gl_connect(const Matrix& a, const ToleranceConfig& tol) {
  GlPieces pieces = gl_segments(a, Matrix(), Matrix(), tol);
  Matrix target = Matrix::Identity(a.rows(), a.cols());
  target(0, 0) = pieces.sign;
  if (pieces.segments.empty()) {
    return GlPath{OperatorPath({PathSegment{ConstantSegment{a}}}, a, target), pieces.sign};
  }
  return GlPath{OperatorPath(std::move(pieces.segments), a, target), pieces.sign};
}

OperatorPath connect_fk(const Matrix& t1, const Matrix& t2, const ToleranceConfig& tol) {
  require_same_shape(t1, t2);
  const int k = rank_of(t1, tol);
  const int k2 = rank_of(t2, tol);
  if (k != k2) {
    throw Error(ErrorKind::RankMismatch, "connect_fk: ranks " + std::to_string(k) + " and " + std::to_string(k2));
  }
  if (k == 0 || same_operator(t1, t2)) return OperatorPath({PathSegment{ConstantSegment{t1}}}, t2, t1);

  const Subspace rows1 = range_basis(t1.transpose(), tol);
  const Subspace rows2 = range_basis(t2.transpose(), tol);
  const Subspace range1 = range_basis(t1, tol);
  const Subspace range2 = range_basis(t2, tol);
  // Common complements: n0 for the two row spaces (kernel side), n_plus for
  // the two ranges.
  const Subspace n0 = common_complement(rows1, rows2, tol);
  const Subspace n_plus = common_complement(range1, range2, tol);

  // T_i ~ L_i = T_i P (onto R_i along n0).
  const OperatorPath kernel_pull1 = right_project_path(t1, n0, rows1, tol);
  const OperatorPath kernel_pull2 = right_project_path(t2, n0, rows2, tol);
  const Matrix l1 = kernel_pull1.start();
  const Matrix l2 = kernel_pull2.start();

  // L2 ~ M = P (onto R(L1) along n_plus) L2.
  Matrix m = l2;
  std::optional<OperatorPath> range_pull;
  if (!n_plus.is_zero()) {
    range_pull = left_project_path(l2, range1, n_plus, tol);
    m = range_pull->start();
  }

  // M = U1 G C with G invertible on R(L1).
  const Matrix frame = range1.basis();
  const Matrix coords = frame.transpose() * l1;
  const Matrix x = restricted_inverse(l1, rows1, frame);
  const Matrix g = frame.transpose() * m * x;
  const OperatorPath middle = invertible_factor_path(frame, g, coords, tol);

  Assembly path;
  path.add(kernel_pull2.reversed());
  if (range_pull) path.add(range_pull->reversed());
  path.add(OperatorPath(middle.segments(), m, l1));
  path.add(kernel_pull1);
  return path.finish(t2, t1);
}

OperatorPath connect_phi(const Matrix& t1, const Matrix& t2, int kernel_dim, int corank, const ToleranceConfig& tol) {
  require_same_shape(t1, t2);
  if (kernel_dim < 0 || corank < 0) throw Error(ErrorKind::InvalidArgument, "negative stratum indices");
  if (kernel_dim == 0 && corank == 0) {
    throw Error(ErrorKind::PreconditionFailed,
                "the stratum with trivial kernel and full range is the invertible group, which is not path "
                "connected");
  }
  for (const Matrix* t : {&t1, &t2}) {
    const int rank = rank_of(*t, tol);
    const auto nullity = t->cols() - rank;
    const auto codim = t->rows() - rank;
    if (nullity != kernel_dim || codim != corank) {
      std::ostringstream os;
      os << "operator has kernel dimension " << nullity << " and range codimension " << codim << ", expected "
         << kernel_dim << " and " << corank;
      throw Error(ErrorKind::PreconditionFailed, os.str());
    }
  }
  if (corank > 0) return connect_fk(t1, t2, tol);
  if (same_operator(t1, t2)) return OperatorPath({PathSegment{ConstantSegment{t1}}}, t2, t1);

  // Surjective case: T2 ~ T2 P (onto R along N(T1)) = (T2 T1^+) T1.
  const Subspace kernel1 = kernel_basis(t1, tol);
  const Subspace kernel2 = kernel_basis(t2, tol);
  const Subspace r = common_complement(kernel1, kernel2, tol);
  const OperatorPath pull = right_project_path(t2, kernel1, r, tol);
  const Matrix frame = Matrix::Identity(t1.rows(), t1.rows());
  const Matrix g = pull.start() * restricted_inverse(t1, r, frame);
  const OperatorPath middle = invertible_factor_path(frame, g, t1, tol);

  Assembly path;
  path.add(pull.reversed());
  path.add(OperatorPath(middle.segments(), pull.start(), t1));
  return path.finish(t2, t1);
}

void validate_witness(const Matrix& t0, const Matrix& t_star, const ChainWitness& w, const ToleranceConfig& tol) {
  require_same_shape(t0, t_star);
  if (w.kernel_complements.size() != w.kernels.size() + 1) {
    throw Error(ErrorKind::WitnessViolation, "kernel chain needs exactly one more complement than kernels");
  }
  if (w.range_complements.size() != w.ranges.size() + 1) {
    throw Error(ErrorKind::WitnessViolation, "range chain needs exactly one more complement than ranges");
  }
  std::vector<Subspace> kernels{kernel_basis(t0, tol)};
  kernels.insert(kernels.end(), w.kernels.begin(), w.kernels.end());
  kernels.push_back(kernel_basis(t_star, tol));
  std::vector<Subspace> ranges{range_basis(t0, tol)};
  ranges.insert(ranges.end(), w.ranges.begin(), w.ranges.end());
  ranges.push_back(range_basis(t_star, tol));

  auto name = [](const char* sym, std::size_t i, std::size_t last, const char* first, const char* final) {
    if (i == 0) return std::string(first);
    if (i == last) return std::string(final);
    return std::string(sym) + "_" + std::to_string(i);
  };
  for (std::size_t j = 0; j < w.kernel_complements.size(); ++j) {
    const Subspace& c = w.kernel_complements[j];
    require_shape(c, t0.cols(), "kernel complement");
    for (std::size_t side : {j, j + 1}) {
      require_shape(kernels[side], t0.cols(), "chain kernel");
      if (const auto rep = is_direct_sum(kernels[side], c, tol); !rep) {
        throw Error(ErrorKind::WitnessViolation,
                    link_failure("kernel chain", "R", j + 1,
                                 name("N", side, kernels.size() - 1, "N(T0)", "N(T_*)"), rep));
      }
    }
  }
  for (std::size_t i = 0; i < w.range_complements.size(); ++i) {
    const Subspace& c = w.range_complements[i];
    require_shape(c, t0.rows(), "range complement");
    for (std::size_t side : {i, i + 1}) {
      require_shape(ranges[side], t0.rows(), "chain range");
      if (const auto rep = is_direct_sum(ranges[side], c, tol); !rep) {
        throw Error(ErrorKind::WitnessViolation,
                    link_failure("range chain", "S", i + 1,
                                 name("F", side, ranges.size() - 1, "R(T0)", "R(T_*)"), rep));
      }
    }
  }
}

OperatorPath chain_connect(const Matrix& t0, const Matrix& t_star, const ChainWitness& w,
                           const ToleranceConfig& tol) {
  require_same_shape(t0, t_star);
  const int k0 = rank_of(t0, tol);
  const int k_star = rank_of(t_star, tol);
  if (k0 != k_star) {
    throw Error(ErrorKind::RankMismatch,
                "chain_connect: ranks " + std::to_string(k0) + " and " + std::to_string(k_star));
  }
  validate_witness(t0, t_star, w, tol);
  if (k0 == 0 || same_operator(t0, t_star)) return OperatorPath({PathSegment{ConstantSegment{t0}}}, t_star, t0);

  // Forward recursion: T_j = T_{j-1} P(onto R_j along N_j), then
  // T_{m+i} = P(onto F_i along S_i) T_{m+i-1}. Each stage runs from the new
  // operator back to the previous one.
  std::vector<OperatorPath> unwinding;
  Matrix current = t0;
  for (std::size_t j = 0; j < w.kernels.size(); ++j) {
    OperatorPath stage = right_project_path(current, w.kernels[j], w.kernel_complements[j], tol);
    current = stage.start();
    unwinding.push_back(std::move(stage));
  }
  for (std::size_t i = 0; i < w.ranges.size(); ++i) {
    if (w.range_complements[i].is_zero()) continue;
    OperatorPath stage = left_project_path(current, w.ranges[i], w.range_complements[i], tol);
    current = stage.start();
    unwinding.push_back(std::move(stage));
  }
  const Matrix& chain_end = current;  // T_{m+n}

  // T_* ~ T_* P(onto R_{m+1} along N_m) ~ P(onto F_n along S_{n+1}) T_* P(...).
  const Subspace last_kernel = w.kernels.empty() ? kernel_basis(t0, tol) : w.kernels.back();
  const Subspace last_range = w.ranges.empty() ? range_basis(t0, tol) : w.ranges.back();
  const OperatorPath kernel_pull = right_project_path(t_star, last_kernel, w.kernel_complements.back(), tol);
  Matrix pulled = kernel_pull.start();
  std::optional<OperatorPath> range_pull;
  if (!w.range_complements.back().is_zero()) {
    range_pull = left_project_path(pulled, last_range, w.range_complements.back(), tol);
    pulled = range_pull->start();
  }

  const Subspace chain_range = range_basis(chain_end, tol);
  const Matrix frame = chain_range.basis();
  const Matrix coords = frame.transpose() * chain_end;
  const Matrix x = restricted_inverse(chain_end, w.kernel_complements.back(), frame);
  const Matrix g = frame.transpose() * pulled * x;
  const OperatorPath middle = invertible_factor_path(frame, g, coords, tol);

  Assembly path;
  path.add(kernel_pull.reversed());
  if (range_pull) path.add(range_pull->reversed());
  path.add(OperatorPath(middle.segments(), pulled, chain_end));
  for (auto it = unwinding.rbegin(); it != unwinding.rend(); ++it) path.add(*it);
  return path.finish(t_star, t0);
}

ChainWitness discover_chain(const Matrix& t0, const Matrix& t_star, const ToleranceConfig& tol) {
  require_same_shape(t0, t_star);
  const int k0 = rank_of(t0, tol);
  const int k_star = rank_of(t_star, tol);
  if (k0 != k_star) {
    throw Error(ErrorKind::RankMismatch,
                "discover_chain: ranks " + std::to_string(k0) + " and " + std::to_string(k_star));
  }
  ChainWitness w;
  w.kernel_complements.push_back(common_complement(kernel_basis(t0, tol), kernel_basis(t_star, tol), tol));
  w.range_complements.push_back(common_complement(range_basis(t0, tol), range_basis(t_star, tol), tol));
  return w;
}

}  // namespace strata
