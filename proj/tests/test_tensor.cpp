#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "linfty/hamiltonian.hpp"
#include "linfty/matrix.hpp"
#include "linfty/tensor_ops.hpp"

using namespace linfty;
using testutil::bruteforce_nullspace_projection;
using testutil::fd_matrix_gradient;
using testutil::gauss_jordan_inverse;
using testutil::random_matrix;
using testutil::random_orthogonal;
using testutil::random_unit;
using testutil::random_vec;
using testutil::uniform;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

}  // namespace

TEST_CASE("radial projections: explicit values") {
  const auto [tang, perp] = radial_projections({1.0, 0.0});
  CHECK(tang(0, 0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(tang(1, 1) == Catch::Approx(0.0).margin(1e-15));
  CHECK(perp(0, 0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(perp(1, 1) == Catch::Approx(1.0).margin(1e-15));

  const double s = 1.0 / std::sqrt(2.0);
  const auto [tang2, perp2] = radial_projections({s, s});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(tang2(i, j) == Catch::Approx(0.5).margin(1e-14));

  CHECK_THROWS_AS(radial_projections({0.0, 0.0}), std::domain_error);
}

TEST_CASE("radial projections: idempotence, symmetry, orthogonality, identity split") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Vec x = random_vec(n, rng);
    if (norm(x) < 1e-3) continue;
    const auto [tang, perp] = radial_projections(x);
    CHECK(max_abs_diff(tang * tang, tang) < 1e-12);
    CHECK(max_abs_diff(perp * perp, perp) < 1e-12);
    CHECK(max_abs_diff(tang.transpose(), tang) < 1e-12);
    CHECK(max_abs_diff(perp.transpose(), perp) < 1e-12);
    CHECK((tang * perp).max_abs() < 1e-12);
    CHECK(max_abs_diff(tang + perp, Matrix::identity(n)) < 1e-12);
  }
}

TEST_CASE("nullspace projection: explicit values") {
  CHECK(nullspace_projection(Matrix::identity(3)).max_abs() < 1e-14);

  Matrix d(2, 2);
  d(0, 0) = 1.0;
  const Matrix p = nullspace_projection(d);
  CHECK(p(0, 0) == Catch::Approx(0.0).margin(1e-14));
  CHECK(p(1, 1) == Catch::Approx(1.0).margin(1e-14));

  Matrix col(2, 1);
  col(0, 0) = 1.0;
  const Matrix pc = nullspace_projection(col);
  const Matrix oracle = bruteforce_nullspace_projection(col);
  CHECK(max_abs_diff(pc, oracle) < 1e-12);
  CHECK(pc(1, 1) == Catch::Approx(1.0).margin(1e-14));

  // zero matrix: nullspace of the transpose is everything
  CHECK(max_abs_diff(nullspace_projection(Matrix(3, 2)), Matrix::identity(3)) < 1e-14);
}

TEST_CASE("nullspace projection: algebra against the brute-force oracle") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 300; ++trial) {
    const int N = 2 + static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % N);
    Matrix P = random_matrix(N, n, rng);
    if (trial % 3 == 0 && n >= 2) {
      // force rank deficiency: last column becomes a combination
      for (int r = 0; r < N; ++r) P(r, n - 1) = 0.5 * P(r, 0);
    }
    const auto info = nullspace_projection_info(P);
    const Matrix& proj = info.projection;
    CHECK((proj * P).max_abs() < 1e-12);
    CHECK(max_abs_diff(proj * proj, proj) < 1e-12);
    CHECK(max_abs_diff(proj.transpose(), proj) < 1e-12);
    CHECK(info.rank == numerical_rank(P));
    // rank of the projection is its trace
    CHECK(proj.trace() == Catch::Approx(N - info.rank).margin(1e-10));
    CHECK(max_abs_diff(proj, bruteforce_nullspace_projection(P)) < 1e-9);
  }
}

TEST_CASE("ahlfors operator: explicit values and invariants") {
  CHECK(ahlfors(Matrix::identity(4)).max_abs() < 1e-15);

  Matrix a(2, 2);
  a(0, 0) = 2.0;
  const Matrix s = ahlfors(a);
  CHECK(s(0, 0) == Catch::Approx(1.0));
  CHECK(s(1, 1) == Catch::Approx(-1.0));
  CHECK(s(0, 1) == Catch::Approx(0.0).margin(1e-15));

  CHECK_THROWS_AS(ahlfors(Matrix(2, 3)), std::domain_error);

  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Matrix m = random_matrix(n, n, rng, -5.0, 5.0);
    const Matrix sm = ahlfors(m);
    CHECK(std::abs(sm.trace()) < 1e-12 * std::max(1.0, m.max_abs()));
    CHECK(max_abs_diff(sm, sm.transpose()) < 1e-14);
  }
}

TEST_CASE("dilation: explicit values and the infinite tag") {
  for (int n = 2; n <= 4; ++n) {
    const Dilation k = dilation(Matrix::identity(n));
    REQUIRE(k.finite);
    CHECK(k.value == Catch::Approx(static_cast<double>(n)).epsilon(1e-14));
  }

  Matrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const Dilation k = dilation(d);
  REQUIRE(k.finite);
  CHECK(k.value == Catch::Approx(2.5).epsilon(1e-14));

  Matrix sing(2, 2);
  sing(0, 0) = 1.0;
  CHECK_FALSE(dilation(sing).finite);
  CHECK_FALSE(dilation(Matrix(3, 3)).finite);
}

TEST_CASE("dilation: scale and rotation invariance, lower bound") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Matrix p = random_matrix(n, n, rng);
    const Dilation k = dilation(p);
    if (!k.finite) continue;
    CHECK(k.value >= n - 1e-10);

    double c = uniform(rng, -3.0, 3.0);
    if (std::abs(c) < 0.1) c = 0.5;
    const Dilation ks = dilation(c * p);
    REQUIRE(ks.finite);
    CHECK(ks.value == Catch::Approx(k.value).epsilon(1e-10));

    const Matrix r = random_orthogonal(n, rng);
    const Dilation kr = dilation(r * p);
    REQUIRE(kr.finite);
    CHECK(kr.value == Catch::Approx(k.value).epsilon(1e-9));
  }
}

TEST_CASE("dilation gradient: explicit values, Euler relation, FD oracle") {
  CHECK(dilation_gradient(Matrix::identity(3)).max_abs() < 1e-13);

  Matrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const auto kfun = [](const Matrix& p) {
    const Dilation k = dilation(p);
    if (!k.finite) throw std::domain_error("dilation infinite");
    return k.value;
  };
  const Matrix grad = dilation_gradient(d);
  const Matrix fd = fd_matrix_gradient(kfun, d, 1e-5);
  CHECK(max_abs_diff(grad, fd) < 1e-6 * std::max(1.0, fd.max_abs()));

  Matrix sing(2, 2);
  sing(0, 0) = 1.0;
  CHECK_THROWS_AS(dilation_gradient(sing), std::domain_error);

  std::mt19937_64 rng(505);
  int accepted = 0;
  for (int trial = 0; trial < 400 && accepted < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const Matrix p = random_matrix(n, n, rng);
    if (numerical_rank(p) < n || std::abs(detail::determinant(p)) < 0.05) continue;
    ++accepted;
    const Matrix g = dilation_gradient(p);
    // 0-homogeneity: K_P(P) : P = 0
    CHECK(std::abs(Matrix::frobenius_inner(g, p)) < 1e-10 * std::max(1.0, g.max_abs()));
    const Matrix gfd = fd_matrix_gradient(kfun, p, 1e-5);
    CHECK(max_abs_diff(g, gfd) < 1e-6 * std::max(1.0, gfd.max_abs()));
  }
  CHECK(accepted >= 200);
}

TEST_CASE("dilation gradient: square-matrix Ahlfors form") {
  // K_P = 2 P^{-T} S(P^T P) / det(P^T P)^{1/n} for square invertible P
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Matrix p = random_matrix(n, n, rng);
    if (std::abs(detail::determinant(p)) < 0.05) continue;
    const Matrix gram = p.transpose() * p;
    const Matrix alt = (2.0 / std::pow(detail::determinant(gram), 1.0 / n)) *
                       (gauss_jordan_inverse(p.transpose()) * ahlfors(gram));
    CHECK(max_abs_diff(dilation_gradient(p), alt) < 1e-9 * std::max(1.0, alt.max_abs()));
  }
}

TEST_CASE("dilation hessian: E tensor entries and conformal-point value") {
  CHECK(dilation_e_tensor(0, 0, 0, 0, 2) == Catch::Approx(1.0));  // 1 + 1 - 2/n at n=2

  // at P = I the Ahlfors summand vanishes and the rest is explicit
  const int n = 3;
  const FourTensor t = dilation_hessian_projected(Matrix::identity(n));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < n; ++b)
        for (int j = 0; j < n; ++j) {
          const double want = 2.0 * ((a == b && i == j ? 1.0 : 0.0) + (a == j && b == i ? 1.0 : 0.0) -
                                     (2.0 / n) * (a == i ? 1.0 : 0.0) * (b == j ? 1.0 : 0.0));
          CHECK(t(a, i, b, j) == Catch::Approx(want).margin(1e-12));
        }
}

TEST_CASE("dilation hessian: projected comparison against the FD Hessian") {
  const auto kfun = [](const Matrix& p) {
    const Dilation k = dilation(p);
    if (!k.finite) throw std::domain_error("dilation infinite");
    return k.value;
  };
  const auto fd_hessian_tensor = [&](const Matrix& P, double h) {
    FourTensor t(P.rows(), P.cols());
    for (int a = 0; a < P.rows(); ++a)
      for (int i = 0; i < P.cols(); ++i)
        for (int b = 0; b < P.rows(); ++b)
          for (int j = 0; j < P.cols(); ++j) {
            Matrix pp = P, pm = P, mp = P, mm = P;
            pp(a, i) += h; pp(b, j) += h;
            pm(a, i) += h; pm(b, j) -= h;
            mp(a, i) -= h; mp(b, j) += h;
            mm(a, i) -= h; mm(b, j) -= h;
            t(a, i, b, j) = (kfun(pp) - kfun(pm) - kfun(mp) + kfun(mm)) / (4.0 * h * h);
          }
    return t;
  };
  const auto projected_diff = [&](const Matrix& P) {
    const FourTensor ours = dilation_hessian_projected(P);
    const FourTensor fd = fd_hessian_tensor(P, 1e-3);
    const Matrix proj = nullspace_projection(dilation_gradient(P));
    const int N = P.rows(), nn = P.cols();
    double m = 0.0;
    for (int a = 0; a < N; ++a)
      for (int i = 0; i < nn; ++i)
        for (int b = 0; b < N; ++b)
          for (int j = 0; j < nn; ++j) {
            double l = 0.0, r = 0.0;
            for (int c = 0; c < N; ++c) {
              l += proj(a, c) * ours(c, i, b, j);
              r += proj(a, c) * fd(c, i, b, j);
            }
            m = std::max(m, std::abs(l - r));
          }
    return m;
  };

  Matrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  CHECK(projected_diff(d) < 1e-5);  // [K_P]^perp = 0 here: both sides vanish

  // conformal point: K_P = 0, the projection is the identity and the
  // comparison exercises the full two-term tensor
  CHECK(projected_diff(Matrix::identity(2)) < 1e-5);
  CHECK(projected_diff(Matrix::identity(3)) < 1e-5);
  std::mt19937_64 rng(707);
  const Matrix scaled_rot = 1.7 * random_orthogonal(3, rng);
  CHECK(projected_diff(scaled_rot) < 1e-5);
}

TEST_CASE("numerical rank") {
  CHECK(numerical_rank(Matrix::identity(4)) == 4);
  Matrix d(2, 2);
  d(0, 0) = 1.0;
  CHECK(numerical_rank(d) == 1);
  CHECK(numerical_rank(Matrix(3, 3)) == 0);
}

TEST_CASE("rank-one inverse: explicit values and product identity") {
  const Matrix id = rank_one_inverse(0.0, {0.3, -0.7});
  CHECK(max_abs_diff(id, Matrix::identity(2)) < 1e-15);

  const Matrix half = rank_one_inverse(1.0, {1.0, 0.0});
  CHECK(half(0, 0) == Catch::Approx(0.5));
  CHECK(half(1, 1) == Catch::Approx(1.0));

  CHECK_THROWS_AS(rank_one_inverse(-1.0, {1.0, 0.0}), std::domain_error);

  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Vec x = random_unit(n, rng);
    double gamma = uniform(rng, -0.9, 4.0);
    const auto [tang, perp] = radial_projections(x);
    Matrix forward = Matrix::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) forward(i, j) += gamma * tang(i, j);
    const Matrix inv = rank_one_inverse(gamma, x);
    CHECK(max_abs_diff(forward * inv, Matrix::identity(n)) < 1e-12);
    // eigenvalue along x is 1/(1+gamma)
    const Vec along = inv.apply(x);
    CHECK(norm(along - (1.0 / (1.0 + gamma)) * x) < 1e-12);
    CHECK(max_abs_diff(inv, gauss_jordan_inverse(forward)) < 1e-11);
  }

  // gamma = 3: eigenvalue along x is 1/4
  const Vec x3 = random_unit(3, rng);
  const Vec img = rank_one_inverse(3.0, x3).apply(x3);
  CHECK(norm(img - 0.25 * x3) < 1e-13);
}

TEST_CASE("hamiltonian model: squared Frobenius consistency") {
  std::mt19937_64 rng(909);
  const auto H = HamiltonianModel::squared_frobenius(2, 3);
  const auto Hfd = HamiltonianModel::from_value(H.value, 2, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix p = random_matrix(2, 3, rng);
    CHECK(H.value(p) == Catch::Approx(Matrix::frobenius_inner(p, p)));
    CHECK(max_abs_diff(H.gradient(p), 2.0 * p) < 1e-15);
    CHECK(max_abs_diff(H.gradient(p), Hfd.gradient(p)) < 1e-8);
    const FourTensor hpp = H.hessian(p);
    CHECK(hpp.pair_asymmetry() < 1e-15);
    const FourTensor hppfd = Hfd.hessian(p);
    double dmax = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 3; ++i)
        for (int b = 0; b < 2; ++b)
          for (int j = 0; j < 3; ++j) dmax = std::max(dmax, std::abs(hpp(a, i, b, j) - hppfd(a, i, b, j)));
    CHECK(dmax < 1e-6);
  }
}
