#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "strata/builders.hpp"
#include "strata/certify.hpp"
#include "strata/error.hpp"
#include "support.hpp"

using strata::Matrix;
using strata::OperatorPath;
using strata::Subspace;
using testing_support::lu_rank;
using testing_support::max_abs;
using testing_support::Rng;

namespace {

Matrix mat(int rows, int cols, std::initializer_list<double> values) {
  Matrix out(rows, cols);
  auto it = values.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = *it++;
  return out;
}

Subspace e(int n, int i) {
  const std::array<int, 1> idx{i};
  return Subspace::coordinate(n, idx);
}

strata::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const strata::Error& err) {
    return err.kind();
  }
  FAIL("expected an error");
  return strata::ErrorKind::InternalConsistency;
}

bool certifies(const OperatorPath& p, int k, const strata::MembershipSpec& m = {}) {
  return strata::certify_path(p, k, 1001, {}, m).verdict == strata::Verdict::Pass;
}

// Smallest sigma_k / sigma_{k+1} ratio on a uniform grid, from an independent SVD.
double worst_gap(const OperatorPath& p, int k, int grid = 201) {
  double worst = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid; ++j) {
    const auto s = Eigen::JacobiSVD<Matrix>(p.eval(j / double(grid - 1))).singularValues();
    const double below = k < s.size() ? std::max(s(k), 1e-300) : 1e-300;
    worst = std::min(worst, s(k - 1) / below);
  }
  return worst;
}

}  // namespace

TEST_CASE("literal flip path follows the printed formulas") {
  const auto g = strata::GraphParam::make(e(2, 0), e(2, 1), mat(1, 1, {1}));
  const auto p = strata::literal_flip_path(e(2, 0), e(2, 1), g);
  REQUIRE(p.size() == 2);
  for (double t : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    CHECK(max_abs(p.segments()[1].evaluate(t) - mat(2, 2, {1 - 2 * t, 0, 1 - t, 0})) < 1e-15);
  }
  CHECK(max_abs(p.segments()[0].evaluate(0.0) - mat(2, 2, {1, 0, 0, 0})) == 0.0);
  CHECK(max_abs(p.end() + mat(2, 2, {1, 0, 0, 0})) == 0.0);
  // Midpoint of the second piece: [[0,0],[1/2,0]], range e2 = R.
  CHECK(max_abs(p.eval(0.75) - mat(2, 2, {0, 0, 0.5, 0})) == 0.0);
}

TEST_CASE("literal flip path degenerate and error cases") {
  const auto g0 = strata::GraphParam::make(Subspace(2), Subspace::whole(2), Matrix(2, 0));
  const auto zero = strata::literal_flip_path(Subspace(2), Subspace::whole(2), g0);
  for (double t : {0.0, 0.4, 1.0}) CHECK(max_abs(zero.eval(t)) == 0.0);

  const auto g = strata::GraphParam::make(Subspace::whole(2), Subspace(2), Matrix(0, 2));
  CHECK(kind_of([&] { (void)strata::literal_flip_path(Subspace::whole(2), Subspace(2), g); }) ==
        strata::ErrorKind::PreconditionFailed);
}

TEST_CASE("audit flags the literal midpoint") {
  const auto g = strata::GraphParam::make(e(2, 0), e(2, 1), mat(1, 1, {1}));
  const auto p = strata::literal_flip_path(e(2, 0), e(2, 1), g);
  const auto report = strata::audit_flip_path(p, e(2, 1), 11);
  CHECK(report.fails_at_flip_midpoint());
  CHECK_FALSE(report.degenerate);
  bool endpoint_ok = true;
  for (const auto& s : report.certificate.samples)
    if (s.t == 0.0 || s.t == 1.0) endpoint_ok = endpoint_ok && s.pass;
  CHECK(endpoint_ok);

  const auto g0 = strata::GraphParam::make(Subspace(2), Subspace::whole(2), Matrix(2, 0));
  const auto zero = strata::literal_flip_path(Subspace(2), Subspace::whole(2), g0);
  const auto degenerate = strata::audit_flip_path(zero, Subspace::whole(2), 11);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.failures.empty());
  CHECK(degenerate.certificate.verdict == strata::Verdict::Degenerate);
}

TEST_CASE("corrected flip examples") {
  const Matrix t = mat(2, 2, {1, 0, 0, 0});
  const auto p = strata::corrected_flip_path(t, 1);
  for (int j = 0; j <= 100; ++j) {
    const double s = j / 100.0;
    const double th = std::numbers::pi * s;
    CHECK(max_abs(p.eval(s) - mat(2, 2, {std::cos(th), 0, std::sin(th), 0})) < 1e-15);
    CHECK(lu_rank(p.eval(s)) == 1);
  }
  CHECK(max_abs(p.eval(1.0) + t) <= 1e-12);

  const auto zero = strata::corrected_flip_path(Matrix::Zero(2, 3), 0);
  CHECK(max_abs(zero.eval(0.5)) == 0.0);

  CHECK(kind_of([] { (void)strata::corrected_flip_path(Matrix::Identity(2, 2), 2); }) ==
        strata::ErrorKind::NoComplementDirection);
  CHECK(kind_of([&] { (void)strata::corrected_flip_path(t, 2); }) == strata::ErrorKind::RankMismatch);
  // A 2x3 rank-2 matrix has no room on the range side.
  CHECK(kind_of([] {
          (void)strata::corrected_flip_path(mat(2, 3, {1, 0, 0, 0, 1, 0}), 2, strata::FlipSide::Range);
        }) == strata::ErrorKind::PreconditionFailed);
  const auto kernel_side = strata::corrected_flip_path(mat(2, 3, {1, 0, 0, 0, 1, 0}), 2);
  CHECK(certifies(kernel_side, 2));
}

TEST_CASE("left projection path examples") {
  const Matrix t0 = mat(2, 2, {1, 0, 1, 0});
  const auto p = strata::left_project_path(t0, e(2, 0), e(2, 1));
  for (double t : {0.0, 0.3, 1.0}) CHECK(max_abs(p.eval(t) - mat(2, 2, {1, 0, t, 0})) < 1e-15);
  CHECK(certifies(p, 1));

  const Matrix t1 = mat(2, 2, {2, 0, 0, 0});
  const auto c = strata::left_project_path(t1, e(2, 0), e(2, 1));
  CHECK(max_abs(c.eval(0.0) - t1) == 0.0);
  CHECK(max_abs(c.eval(0.5) - t1) == 0.0);

  CHECK(kind_of([&] { (void)strata::left_project_path(t0, e(2, 0), Subspace(2)); }) ==
        strata::ErrorKind::PreconditionFailed);
  CHECK(kind_of([&] { (void)strata::left_project_path(t0, e(2, 0), Subspace::from_basis(mat(2, 1, {1, 1}))); }) ==
        strata::ErrorKind::PreconditionFailed);
}

TEST_CASE("left projection path in R^3 with dim N = 2") {
  Rng rng(31);
  const Matrix t0 = rng.rank_k(3, 3, 1);
  const std::array<int, 2> idx{1, 2};
  const Subspace n = Subspace::coordinate(3, idx);
  const auto p = strata::left_project_path(t0, e(3, 0), n);
  strata::MembershipSpec m;
  m.range_complements.push_back(n);
  m.kernel_equals.push_back(strata::kernel_basis(t0));
  CHECK(certifies(p, 1, m));
}

TEST_CASE("right projection path examples") {
  const Matrix t0 = mat(2, 2, {1, 0, 0, 0});
  // R0 equal to N(T0) cannot complement it.
  CHECK(kind_of([&] { (void)strata::right_project_path(t0, e(2, 0), e(2, 1)); }) ==
        strata::ErrorKind::PreconditionFailed);

  const auto same = strata::right_project_path(t0, e(2, 1), e(2, 0));
  CHECK(max_abs(same.eval(0.0) - t0) == 0.0);
  CHECK(max_abs(same.eval(0.7) - t0) == 0.0);

  const Matrix t1 = mat(2, 2, {1, 1, 0, 0});
  const auto p = strata::right_project_path(t1, e(2, 1), e(2, 0));
  // Projector onto e1 along e2 is diag(1, 0): start = T1 diag(1, 0).
  CHECK(max_abs(p.eval(0.0) - mat(2, 2, {1, 0, 0, 0})) < 1e-15);
  CHECK(max_abs(p.eval(1.0) - t1) < 1e-15);
  CHECK(p.segments()[0].kind() == "right-affine");
  strata::MembershipSpec m;
  m.kernel_complements.push_back(e(2, 0));
  CHECK(certifies(p, 1, m));
  for (double t : {0.25, 0.5, 0.75}) CHECK(strata::same_subspace(strata::range_basis(p.eval(t)), e(2, 0)));
}

TEST_CASE("gl_connect examples") {
  const auto id = strata::gl_connect(Matrix::Identity(3, 3));
  CHECK(id.sign == 1);
  CHECK(max_abs(id.path.eval(0.5) - Matrix::Identity(3, 3)) == 0.0);

  const auto d = strata::gl_connect(mat(2, 2, {2, 0, 0, 1}));
  CHECK(d.sign == 1);
  CHECK(d.path.size() == 1);
  CHECK(d.path.segments()[0].kind() == "spd-line");
  CHECK(max_abs(d.path.eval(1.0) - Matrix::Identity(2, 2)) < 1e-15);
  CHECK(max_abs(d.path.eval(0.5) - mat(2, 2, {1.5, 0, 0, 1})) < 1e-15);

  const auto neg = strata::gl_connect(mat(2, 2, {-1, 0, 0, 1}));
  CHECK(neg.sign == -1);
  CHECK(max_abs(neg.path.eval(1.0) - mat(2, 2, {-1, 0, 0, 1})) < 1e-15);

  CHECK(kind_of([] { (void)strata::gl_connect(mat(2, 2, {1, 2, 2, 4})); }) == strata::ErrorKind::NumericallySingular);
}

TEST_CASE("gl_connect stays invertible on seeded matrices") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 6);
    const Matrix a = rng.matrix(n, n);
    const double smin = Eigen::JacobiSVD<Matrix>(a).singularValues().minCoeff();
    if (smin < 1e-3) continue;
    const auto gl = strata::gl_connect(a);
    CHECK(gl.sign == (a.determinant() > 0 ? 1 : -1));
    Matrix d = Matrix::Identity(n, n);
    d(0, 0) = gl.sign;
    CHECK(max_abs(gl.path.eval(1.0) - d) < 1e-12);
    CHECK(max_abs(gl.path.eval(0.0) - a) < 1e-12 * (1 + max_abs(a)));
    for (int j = 0; j <= 100; ++j) {
      const double s = Eigen::JacobiSVD<Matrix>(gl.path.eval(j / 100.0)).singularValues().minCoeff();
      CHECK(s >= 0.5 * std::min(1.0, smin));
    }
  }
}

TEST_CASE("rotation_log") {
  Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 6);
    Matrix q = rng.orthonormal(n, n);
    if (q.determinant() < 0) q.col(0) *= -1;
    const Matrix k = strata::rotation_log(q);
    CHECK(max_abs(k + k.transpose()) < 1e-12);
    CHECK(max_abs(Matrix(k.exp()) - q) < 1e-10);
  }
  Matrix half_turns = Matrix::Identity(5, 5);
  half_turns.topLeftCorner(4, 4) *= -1.0;
  const Matrix k = strata::rotation_log(half_turns);
  CHECK(max_abs(Matrix(k.exp()) - half_turns) < 1e-10);
}

TEST_CASE("connect_fk examples") {
  const Matrix t1 = mat(2, 2, {1, 0, 0, 0});
  const Matrix t2 = mat(2, 2, {0, 0, 0, 1});
  const auto p = strata::connect_fk(t1, t2);
  CHECK(max_abs(p.eval(0.0) - t2) < 1e-12);
  CHECK(max_abs(p.eval(1.0) - t1) < 1e-12);
  CHECK(certifies(p, 1));

  const auto same = strata::connect_fk(t1, t1);
  CHECK(max_abs(same.eval(0.5) - t1) == 0.0);

  const auto flipped = strata::connect_fk(t1, -t1);
  bool has_flip = false;
  for (const auto& s : flipped.segments()) has_flip = has_flip || s.kind() == "rotation-flip";
  CHECK(has_flip);
  CHECK(certifies(flipped, 1));

  CHECK(kind_of([&] { (void)strata::connect_fk(t1, Matrix::Identity(2, 2)); }) == strata::ErrorKind::RankMismatch);
  CHECK(kind_of([&] { (void)strata::connect_fk(t1, Matrix::Zero(2, 3)); }) == strata::ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { (void)strata::connect_fk(Matrix::Identity(2, 2), mat(2, 2, {1, 0, 0, -1})); }) ==
        strata::ErrorKind::DisconnectedComponents);
  // Same component: a rotation away.
  const auto rot = strata::connect_fk(Matrix::Identity(2, 2), mat(2, 2, {0, -1, 1, 0}));
  CHECK(certifies(rot, 2));
}

TEST_CASE("connect_phi examples") {
  const Matrix t1 = mat(2, 3, {1, 0, 0, 0, 1, 0});
  const Matrix t2 = mat(2, 3, {0, 1, 0, 0, 0, 1});
  const auto p = strata::connect_phi(t1, t2, 1, 0);
  CHECK(max_abs(p.eval(0.0) - t2) < 1e-12);
  CHECK(max_abs(p.eval(1.0) - t1) < 1e-12);
  const auto cert = strata::certify_path(p, 2, 1001);
  CHECK(cert.verdict == strata::Verdict::Pass);
  for (const auto& s : cert.samples) CHECK(3 - s.rank == 1);

  CHECK(kind_of([] { (void)strata::connect_phi(Matrix::Identity(2, 2), Matrix::Identity(2, 2), 0, 0); }) ==
        strata::ErrorKind::PreconditionFailed);
  CHECK(kind_of([&] { (void)strata::connect_phi(t1, t2, 0, 1); }) == strata::ErrorKind::PreconditionFailed);

  const Matrix t3 = mat(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 0});
  const auto c = strata::connect_phi(t3, t3, 1, 1);
  CHECK(max_abs(c.eval(0.4) - t3) == 0.0);
}

TEST_CASE("chain_connect and discover_chain examples") {
  const Matrix t0 = mat(2, 2, {1, 0, 0, 0});
  const Matrix ts = mat(2, 2, {0, 0, 1, 1});
  const auto w = strata::discover_chain(t0, ts);
  CHECK(w.kernels.empty());
  CHECK(w.ranges.empty());
  REQUIRE(w.kernel_complements.size() == 1);
  REQUIRE(w.range_complements.size() == 1);
  CHECK(w.kernel_complements[0].dim() == 1);
  CHECK(w.range_complements[0].dim() == 1);
  const auto p = strata::chain_connect(t0, ts, w);
  CHECK(max_abs(p.eval(0.0) - ts) < 1e-12);
  CHECK(max_abs(p.eval(1.0) - t0) < 1e-12);
  CHECK(certifies(p, 1));

  const auto trivial = strata::discover_chain(t0, t0);
  const auto c = strata::chain_connect(t0, t0, trivial);
  CHECK(max_abs(c.eval(0.5) - t0) == 0.0);

  strata::ChainWitness bad = w;
  bad.kernel_complements[0] = strata::kernel_basis(t0);  // cannot complement N(T0)
  CHECK(kind_of([&] { (void)strata::chain_connect(t0, ts, bad); }) == strata::ErrorKind::WitnessViolation);
  CHECK(kind_of([&] { (void)strata::discover_chain(t0, Matrix::Identity(2, 2)); }) == strata::ErrorKind::RankMismatch);
}

TEST_CASE("rank constancy across builders on seeded instances") {
  Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = rng.integer(1, 6);
    const int n = rng.integer(1, 6);
    const int k = rng.integer(1, std::min(m, n));
    const Matrix a = rng.rank_k(n, m, k);
    const Matrix b = rng.rank_k(n, m, k);
    CAPTURE(trial);
    CAPTURE(m);
    CAPTURE(n);
    CAPTURE(k);
    if (!(k == m && k == n)) {
      const auto flip = strata::corrected_flip_path(a, k);
      CHECK(max_abs(flip.eval(0.0) - a) <= 1e-12);
      CHECK(max_abs(flip.eval(1.0) + a) <= 1e-12);
      CHECK(worst_gap(flip, k) >= 1e6);

      const auto phi = strata::connect_phi(a, b, m - k, n - k);
      CHECK(worst_gap(phi, k) >= 1e6);
      CHECK(certifies(phi, k));

      const auto fk = strata::connect_fk(a, b);
      CHECK(worst_gap(fk, k) >= 1e6);
    }
    if (k == m && k == n && (a.determinant() > 0) != (b.determinant() > 0)) continue;
    const auto chain = strata::chain_connect(a, b, strata::discover_chain(a, b));
    CHECK(worst_gap(chain, k) >= 1e6);
    CHECK(strata::approx_equal(chain.eval(0.0), b, 1e-9));
    CHECK(strata::approx_equal(chain.eval(1.0), a, 1e-9));
  }
}

TEST_CASE("one-sided projection paths keep their fixed side") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = rng.integer(2, 6);
    const int n = rng.integer(2, 6);
    const int k = rng.integer(1, std::min(m, n) - 1);
    const Matrix t0 = rng.rank_k(n, m, k);
    // Random complements of the range and kernel, and random alternatives.
    const Subspace nplus = Subspace::from_basis(rng.matrix(n, n - k));
    const Subspace fstar = Subspace::from_basis(rng.matrix(n, k));
    const Subspace r0 = Subspace::from_basis(rng.matrix(m, k));
    const Subspace estar = Subspace::from_basis(rng.matrix(m, m - k));
    if (!strata::is_direct_sum(strata::range_basis(t0), nplus) || !strata::is_direct_sum(fstar, nplus)) continue;
    if (!strata::is_direct_sum(strata::kernel_basis(t0), r0) || !strata::is_direct_sum(estar, r0)) continue;

    const auto left = strata::left_project_path(t0, fstar, nplus);
    strata::MembershipSpec lm;
    lm.range_complements.push_back(nplus);
    lm.kernel_equals.push_back(strata::kernel_basis(t0));
    CHECK(certifies(left, k, lm));
    CHECK(max_abs(left.eval(0.0) - strata::oblique_projection(fstar, nplus).projector * t0) < 1e-9);

    const auto right = strata::right_project_path(t0, estar, r0);
    strata::MembershipSpec rm;
    rm.kernel_complements.push_back(r0);
    CHECK(certifies(right, k, rm));
    CHECK(max_abs(right.eval(0.0) - t0 * strata::oblique_projection(r0, estar).projector) < 1e-9);
    for (double t : {0.3, 0.6}) CHECK(strata::same_subspace(strata::range_basis(right.eval(t)), strata::range_basis(t0)));
  }
}
