#include "test_support.hpp"

#include <doctest.h>

#include <functional>

using namespace rkhs;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvariantViolation;
}

std::vector<Point> random_points_for(const Kernel& k, std::mt19937_64& rng, std::size_t n) {
  if (k.disk_domain()) return testing::random_disk_points(rng, n, 0.95);
  return testing::random_euclidean_points(rng, n, 1 + n % 3);
}

std::vector<Kernel> all_kernels() {
  return {Kernel::gaussian(0.7), Kernel::laplacian(1.3), Kernel::polynomial(3, 0.5),
          Kernel::szego(), Kernel::bergman()};
}

}  // namespace

TEST_CASE("kernel values") {
  const Point x = Point::euclidean({0.3, -1.2});
  CHECK(eval(Kernel::gaussian(1.0), x, x) == Scalar(1.0));
  CHECK(eval(Kernel::szego(), Point::disk(0.4), Point::disk(0.0)) == Scalar(1.0));
  CHECK(eval(Kernel::szego(), Point::disk({0.2, 0.7}), Point::disk(0.0)) == Scalar(1.0));
  CHECK(std::abs(eval(Kernel::szego(), Point::disk(0.5), Point::disk(0.5)) - 4.0 / 3.0) < 1e-15);
  CHECK(std::abs(eval(Kernel::bergman(), Point::disk(0.5), Point::disk(0.5)) - 16.0 / 9.0) <
        1e-15);

  const Point a = Point::euclidean({0.0, 0.0});
  const Point b = Point::euclidean({3.0, 4.0});
  CHECK(std::abs(eval(Kernel::gaussian(0.1), a, b) - std::exp(-2.5)) < 1e-15);
  CHECK(std::abs(eval(Kernel::laplacian(0.2), a, b) - std::exp(-1.0)) < 1e-15);
  const Point c = Point::euclidean({1.0, 2.0});
  CHECK(std::abs(eval(Kernel::polynomial(2, 1.0), b, c) - 144.0) < 1e-12);
}

TEST_CASE("Szego kernel convention K(z, w) = 1/(1 - conj(w) z)") {
  const Scalar z(0.3, 0.2), w(-0.1, 0.5);
  const Scalar expected = 1.0 / (1.0 - std::conj(w) * z);
  CHECK(std::abs(eval(Kernel::szego(), Point::disk(z), Point::disk(w)) - expected) < 1e-15);
}

TEST_CASE("kernel parameters and domains are validated") {
  CHECK_THROWS_AS(Kernel::gaussian(0.0), Error);
  CHECK_THROWS_AS(Kernel::gaussian(-1.0), Error);
  CHECK_THROWS_AS(Kernel::laplacian(0.0), Error);
  CHECK_THROWS_AS(Kernel::polynomial(0, 1.0), Error);
  CHECK_THROWS_AS(Kernel::polynomial(2, -0.5), Error);

  CHECK(code_of([] { eval(Kernel::szego(), Point::euclidean({0.1}), Point::disk(0.1)); }) ==
        Errc::DomainMismatch);
  CHECK(code_of([] { eval(Kernel::gaussian(1.0), Point::disk(0.1), Point::disk(0.1)); }) ==
        Errc::DomainMismatch);
  CHECK(code_of([] {
          eval(Kernel::gaussian(1.0), Point::euclidean({0.0}), Point::euclidean({0.0, 1.0}));
        }) == Errc::DimensionMismatch);
}

TEST_CASE("gram examples") {
  SUBCASE("one point") {
    const GramMatrix q = gram(Kernel::gaussian(1.0), {Point::euclidean({2.0})});
    REQUIRE(q.size() == 1);
    CHECK(q.entries()(0, 0) == Scalar(1.0));
  }
  SUBCASE("unit distance") {
    const GramMatrix q =
        gram(Kernel::gaussian(1.0), {Point::euclidean({0.0, 0.0}), Point::euclidean({0.6, 0.8})});
    CHECK(std::abs(q.entries()(0, 1) - std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(q.entries()(1, 0) - std::exp(-1.0)) < 1e-15);
  }
  SUBCASE("Szego at 0 and 0.5") {
    const GramMatrix q = gram(Kernel::szego(), {Point::disk(0.0), Point::disk(0.5)});
    CHECK(q.entries()(0, 0) == Scalar(1.0));
    CHECK(q.entries()(0, 1) == Scalar(1.0));
    CHECK(q.entries()(1, 0) == Scalar(1.0));
    CHECK(std::abs(q.entries()(1, 1) - 4.0 / 3.0) < 1e-15);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { gram(Kernel::gaussian(1.0), {Point::euclidean({1.0}), Point::euclidean({1.0})}); }) ==
          Errc::DuplicatePoint);
    CHECK(code_of([] { gram(Kernel::bergman(), {Point::euclidean({1.0})}); }) ==
          Errc::DomainMismatch);
  }
}

TEST_CASE("gram matrices are exactly Hermitian with a real diagonal") {
  std::mt19937_64 rng(3);
  for (const Kernel& k : all_kernels()) {
    const auto pts = random_points_for(k, rng, 9);
    const Matrix q = gram(k, pts).entries();
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      CHECK(q(i, i).imag() == 0.0);
      for (Eigen::Index j = 0; j < q.cols(); ++j) CHECK(q(i, j) == std::conj(q(j, i)));
    }
    // K(y, x) = conj(K(x, y)) pointwise as well.
    const Scalar kxy = eval(k, pts[0], pts[1]);
    const Scalar kyx = eval(k, pts[1], pts[0]);
    CHECK(std::abs(kxy - std::conj(kyx)) <= 1e-15 * std::max(1.0, std::abs(kxy)));
  }
}

TEST_CASE("random gram matrices are positive semidefinite for every kernel") {
  std::mt19937_64 rng(11);
  for (const Kernel& k : all_kernels()) {
    CAPTURE(k.name());
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + trial % 12;
      const Matrix q = gram(k, random_points_for(k, rng, n)).entries();
      // Oracle: eigenvalues of the realified symmetric matrix [[A, -B], [B, A]]
      // are those of Q, each repeated twice.
      Eigen::MatrixXd real(2 * n, 2 * n);
      real << q.real(), -q.imag(), q.imag(), q.real();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(real, Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues().minCoeff();
      const double lmax = es.eigenvalues().maxCoeff();
      CHECK(lmin >= -1e-9 * std::max(1.0, lmax));
      CHECK(std::abs(min_eigenvalue(q) - lmin) <= 1e-10 * std::max(1.0, lmax));
    }
  }
}

TEST_CASE("min_eigenvalue examples") {
  Matrix i2 = Matrix::Identity(2, 2);
  CHECK(std::abs(min_eigenvalue(i2) - 1.0) < 1e-15);
  Matrix ones = Matrix::Ones(2, 2);
  CHECK(std::abs(min_eigenvalue(ones)) < 1e-15);
  Matrix m(2, 2);
  m << 2.0, 1.0, 1.0, 2.0;
  CHECK(std::abs(min_eigenvalue(m) - 1.0) < 1e-14);
  CHECK(is_positive_semidefinite(ones));
  Matrix neg(2, 2);
  neg << 1.0, 2.0, 2.0, 1.0;
  CHECK_FALSE(is_positive_semidefinite(neg));
}

TEST_CASE("explicit gram matrices are validated") {
  Matrix ok = Matrix::Ones(2, 2);
  CHECK_NOTHROW(GramMatrix::from_matrix(ok));
  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.4, 1.0;
  CHECK(code_of([&] { GramMatrix::from_matrix(asym); }) == Errc::InvariantViolation);
  Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK(code_of([&] { GramMatrix::from_matrix(indefinite); }) == Errc::InvariantViolation);
  CHECK(code_of([] { GramMatrix::from_matrix(Matrix::Ones(2, 3)); }) ==
        Errc::InvariantViolation);
}

TEST_CASE("rkhs_norm_sq") {
  Matrix c(1, 1);
  c << 2.5;
  Vector one(1);
  one << 1.0;
  CHECK(rkhs_norm_sq(Vector::Zero(1), c) == 0.0);
  CHECK(rkhs_norm_sq(one, c) == 2.5);
  Vector a(2);
  a << 1.0, -1.0;
  CHECK(rkhs_norm_sq(a, Matrix::Ones(2, 2)) == 0.0);
  CHECK(code_of([&] { rkhs_norm_sq(a, c); }) == Errc::DimensionMismatch);

  Diagnostics diag;
  Matrix negative(1, 1);
  negative << -1e-6;
  CHECK(rkhs_norm_sq(one, negative, &diag) == 0.0);
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("reproducing property and quadratic form on finite spans") {
  std::mt19937_64 rng(23);
  for (const Kernel& k : all_kernels()) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto pts = random_points_for(k, rng, 7);
      const Matrix q = gram(k, pts).entries();
      const Vector alpha = testing::random_vector(rng, 7, k.disk_domain());
      const Vector qa = q * alpha;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        Scalar f = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) f += alpha(j) * eval(k, pts[i], pts[j]);
        CHECK(std::abs(f - qa(i)) <= 1e-10 * std::max(1.0, std::abs(f)));
      }
      Scalar direct = 0.0;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) direct += std::conj(alpha(i)) * qa(i);
      const double norm_sq = rkhs_norm_sq(alpha, q);
      CHECK(std::abs(norm_sq - direct.real()) <= 1e-12 * std::max(1.0, norm_sq));
    }
  }
}

TEST_CASE("embed_fmeasure") {
  const Kernel k = Kernel::gaussian(1.0);
  const Point x1 = Point::euclidean({0.0, 0.0});
  const Point x2 = Point::euclidean({1.0, 2.0});
  const Point y = Point::euclidean({0.5, -0.5});

  SUBCASE("delta measure reproduces the kernel section") {
    const Vector v = embed_fmeasure(k, FMeasure({x1}, {1.0}), {y});
    CHECK(v(0) == eval(k, y, x1));
  }
  SUBCASE("zero measure") {
    const Vector v = embed_fmeasure(k, FMeasure(), {y, x1});
    CHECK(v.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("difference of deltas") {
    const Vector v = embed_fmeasure(k, FMeasure({x1, x2}, {1.0, -1.0}), {x1});
    CHECK(std::abs(v(0) - (1.0 - std::exp(-5.0))) < 1e-15);
  }
  SUBCASE("linearity") {
    std::mt19937_64 rng(8);
    const Kernel sz = Kernel::szego();
    const auto pts = testing::random_disk_points(rng, 10);
    const auto eval_pts = testing::random_disk_points(rng, 6);
    const Vector w1 = testing::random_vector(rng, 10, true);
    const Vector w2 = testing::random_vector(rng, 10, true);
    auto to_vec = [](const Vector& w) { return std::vector<Scalar>(w.data(), w.data() + w.size()); };
    const Vector e1 = embed_fmeasure(sz, FMeasure(pts, to_vec(w1)), eval_pts);
    const Vector e2 = embed_fmeasure(sz, FMeasure(pts, to_vec(w2)), eval_pts);
    const Vector e12 = embed_fmeasure(sz, FMeasure(pts, to_vec(w1 + w2)), eval_pts);
    CHECK(testing::max_abs_diff(e12, e1 + e2) <= 1e-12 * std::max(1.0, e12.cwiseAbs().maxCoeff()));
  }
  SUBCASE("domain checked") {
    CHECK(code_of([&] { embed_fmeasure(Kernel::szego(), FMeasure({x1}, {1.0}), {Point::disk(0.0)}); }) ==
          Errc::DomainMismatch);
  }
}

TEST_CASE("kernel scaling multiplies the gram matrix") {
  const auto pts = std::vector<Point>{Point::euclidean({0.0}), Point::euclidean({0.4})};
  const Matrix q = gram(Kernel::gaussian(1.0), pts).entries();
  const Matrix q3 = gram(Kernel::gaussian(1.0).scaled(3.0), pts).entries();
  CHECK(testing::max_abs_diff(Eigen::Map<const Vector>(q3.data(), 4),
                              Eigen::Map<const Vector>(Matrix(3.0 * q).data(), 4)) < 1e-15);
  CHECK_THROWS_AS(Kernel::gaussian(1.0).scaled(0.0), Error);
}
