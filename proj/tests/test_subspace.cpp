#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "strata/error.hpp"
#include "strata/subspace.hpp"
#include "support.hpp"

using strata::Matrix;
using strata::Subspace;
using strata::Vector;
using testing_support::lu_direct_sum;
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

Subspace span(int rows, int cols, std::initializer_list<double> values) {
  return Subspace::from_basis(mat(rows, cols, values));
}

Subspace e(int n, int i) {
  const std::array<int, 1> idx{i};
  return Subspace::coordinate(n, idx);
}

}  // namespace

TEST_CASE("rank_of") {
  CHECK(strata::rank_of(mat(2, 2, {1, 0, 0, 0})) == 1);
  CHECK(strata::rank_of(Matrix::Zero(3, 2)) == 0);
  const Matrix proportional = mat(3, 2, {1, 2, 2, 4, 3, 6});
  CHECK(strata::rank_of(proportional) == 1);
  CHECK(lu_rank(proportional) == 1);
}

TEST_CASE("rank_of honours the relative cutoff") {
  Matrix a = Matrix::Identity(2, 2);
  a(1, 1) = 1e-11;
  CHECK(strata::rank_of(a) == 1);
  CHECK(strata::rank_of(a, {1e-12, 1e8}) == 2);
}

TEST_CASE("kernel_basis") {
  CHECK(strata::same_subspace(strata::kernel_basis(mat(2, 2, {1, 0, 0, 0})), e(2, 1)));
  CHECK(strata::kernel_basis(Matrix::Identity(3, 3)).is_zero());
  // 2x2 homogeneous system x + 2y = 0 by hand: (2, -1).
  CHECK(strata::same_subspace(strata::kernel_basis(mat(2, 2, {1, 2, 2, 4})), span(2, 1, {2, -1})));
}

TEST_CASE("range_basis") {
  CHECK(strata::same_subspace(strata::range_basis(mat(2, 2, {1, 0, 3, 0})), span(2, 1, {1, 3})));
  CHECK(strata::range_basis(Matrix::Zero(2, 2)).is_zero());
  const Subspace r = strata::range_basis(mat(3, 2, {1, 1, 1, 1, 0, 1}));
  CHECK(r.dim() == 2);
  // Both elimination-oracle vectors lie in the range.
  for (const Vector& v : {Vector{{1.0, 1.0, 0.0}}, Vector{{1.0, 1.0, 1.0}}}) {
    CHECK((v - r.orthogonal_projector() * v).norm() < 1e-12);
  }
}

TEST_CASE("is_direct_sum") {
  CHECK(strata::is_direct_sum(e(2, 0), e(2, 1)).is_direct);
  const auto skew = strata::is_direct_sum(e(2, 0), span(2, 1, {1, 1}));
  CHECK(skew.is_direct);
  CHECK(mat(2, 2, {1, 1, 0, 1}).determinant() == doctest::Approx(1.0));
  const auto same = strata::is_direct_sum(e(2, 0), e(2, 0));
  CHECK_FALSE(same.is_direct);
  CHECK(same.dim_sum == 2);
  CHECK_FALSE(strata::is_direct_sum(e(3, 0), e(3, 1)).is_direct);
  CHECK_THROWS_AS(strata::is_direct_sum(e(2, 0), e(3, 1)), strata::Error);
}

TEST_CASE("is_direct_sum reports the condition number") {
  const auto rep = strata::is_direct_sum(e(2, 0), span(2, 1, {1, 1e-10}));
  CHECK_FALSE(rep.is_direct);
  CHECK(rep.condition > 1e8);
  const std::array<Subspace, 3> parts{e(3, 0), e(3, 1), e(3, 2)};
  const auto three = strata::is_direct_sum(parts);
  CHECK(three.is_direct);
  CHECK(three.condition == doctest::Approx(1.0));
}

TEST_CASE("orthogonal_complement") {
  CHECK(strata::same_subspace(strata::orthogonal_complement(e(2, 0)), e(2, 1)));
  CHECK(strata::orthogonal_complement(Subspace(3)).dim() == 3);
  const Subspace c = strata::orthogonal_complement(span(2, 1, {1, 1}));
  CHECK(strata::same_subspace(c, span(2, 1, {1, -1})));
  CHECK(std::abs(c.basis().col(0).dot(Vector{{1.0, 1.0}})) < 1e-14);
}

TEST_CASE("sum_and_intersection") {
  auto [s1, i1] = strata::sum_and_intersection(e(2, 0), e(2, 1));
  CHECK(s1.dim() == 2);
  CHECK(i1.is_zero());
  auto [s2, i2] = strata::sum_and_intersection(e(2, 0), e(2, 0));
  CHECK(strata::same_subspace(s2, e(2, 0)));
  CHECK(strata::same_subspace(i2, e(2, 0)));
  const std::array<int, 2> a{0, 1}, b{1, 2};
  auto [s3, i3] = strata::sum_and_intersection(Subspace::coordinate(3, a), Subspace::coordinate(3, b));
  CHECK(s3.dim() == 3);
  CHECK(strata::same_subspace(i3, e(3, 1)));
}

TEST_CASE("common_complement examples") {
  const Subspace r1 = strata::common_complement(e(2, 0), e(2, 1));
  CHECK(strata::same_subspace(r1, span(2, 1, {1, 1})));
  CHECK(mat(2, 2, {1, 1, 0, 1}).determinant() != 0.0);  // e1 with e1+e2
  CHECK(mat(2, 2, {0, 1, 1, 1}).determinant() != 0.0);  // e2 with e1+e2

  const Subspace r2 = strata::common_complement(e(2, 0), e(2, 0));
  CHECK(strata::same_subspace(r2, e(2, 1)));

  const std::array<int, 2> a{0, 1}, b{1, 2};
  const Subspace e1 = Subspace::coordinate(4, a);
  const Subspace e2 = Subspace::coordinate(4, b);
  const Subspace r3 = strata::common_complement(e1, e2);
  CHECK(r3.dim() == 2);
  CHECK(strata::is_direct_sum(e1, r3).is_direct);
  CHECK(strata::is_direct_sum(e2, r3).is_direct);
  CHECK(lu_direct_sum(e1.basis(), r3.basis()));
  CHECK(lu_direct_sum(e2.basis(), r3.basis()));

  CHECK_THROWS_AS(strata::common_complement(e(3, 0), Subspace::coordinate(3, a)), strata::Error);
}

TEST_CASE("from_basis rejects dependent columns") {
  CHECK_THROWS_AS(Subspace::from_basis(mat(2, 2, {1, 2, 2, 4})), strata::Error);
  CHECK(Subspace::span_of(mat(2, 2, {1, 2, 2, 4})).dim() == 1);
}

TEST_CASE("principal angles") {
  const double angle = strata::max_principal_angle(e(2, 0), span(2, 1, {1, 1}));
  CHECK(angle == doctest::Approx(std::numbers::pi / 4));
  CHECK(strata::max_principal_angle(e(2, 0), Subspace(2)) == doctest::Approx(std::numbers::pi / 2));
  CHECK(strata::max_principal_angle(Subspace(2), Subspace(2)) == 0.0);
  // Small angles keep full relative accuracy.
  CHECK(strata::max_principal_angle(e(2, 0), span(2, 1, {1, 1e-12})) == doctest::Approx(1e-12).epsilon(1e-6));
}

TEST_CASE("properties over seeded matrices and pairs") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = rng.integer(1, 8);
    const int cols = rng.integer(1, 8);
    const int k = rng.integer(0, std::min(rows, cols));
    const Matrix a = rng.matrix(rows, k) * rng.matrix(k, cols);
    const int r = strata::rank_of(a);
    const Subspace ker = strata::kernel_basis(a);
    CHECK(ker.dim() + r == cols);
    CHECK(r == lu_rank(a));
    if (!ker.is_zero()) CHECK(max_abs(a * ker.basis()) <= 1e-10 * (1.0 + max_abs(a)));
    CHECK(strata::range_basis(a).dim() == r);
  }
  for (int n = 2; n <= 8; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      const int d = rng.integer(0, n);
      const int shared = d == 0 ? 0 : rng.integer(0, d);
      const Matrix common = rng.matrix(n, shared);
      Matrix b1(n, d), b2(n, d);
      b1 << common, rng.matrix(n, d - shared);
      b2 << common, rng.matrix(n, d - shared);
      const Subspace e1 = Subspace::span_of(b1);
      const Subspace e2 = Subspace::span_of(b2);
      auto [sum, meet] = strata::sum_and_intersection(e1, e2);
      CHECK(e1.dim() + e2.dim() == sum.dim() + meet.dim());
      Matrix both(n, 2 * d);
      both << b1, b2;
      CHECK(sum.dim() == lu_rank(both));
      if (e1.dim() != e2.dim()) continue;
      const Subspace r = strata::common_complement(e1, e2);
      CHECK(strata::is_direct_sum(e1, r).is_direct);
      CHECK(strata::is_direct_sum(e2, r).is_direct);

      const Subspace back = strata::orthogonal_complement(strata::orthogonal_complement(e1));
      CHECK(strata::max_principal_angle(back, e1) < 1e-8);
    }
  }
}

TEST_CASE("tolerance validation and environment override") {
  CHECK_THROWS_AS((strata::ToleranceConfig{1.5, 1e8}.validate()), strata::Error);
  CHECK_THROWS_AS((strata::ToleranceConfig{1e-10, 0.5}.validate()), strata::Error);
  CHECK_NOTHROW(strata::ToleranceConfig{}.validate());
  setenv("STRATA_TOL", "1e-6", 1);
  CHECK(strata::ToleranceConfig::from_environment().rank_rel_tol == 1e-6);
  unsetenv("STRATA_TOL");
  CHECK(strata::ToleranceConfig::from_environment().rank_rel_tol == 1e-10);
}
