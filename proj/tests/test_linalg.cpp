/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>

#include "dancing/linalg.hpp"
#include "dancing/numeric.hpp"

using namespace dancing;

namespace {

// independent cofactor-expansion oracle for the two cross products
Covec3 cross_vv_oracle(const Vec3& v, const Vec3& w) {
  Covec3 r;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    r[i] = v[j] * w[k] - v[k] * w[j];
  }
  return r;
}

Eigen::Matrix3d to_eigen(const Mat3& a) {
  Eigen::Matrix3d e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = a(i, j);
  return e;
}

}  // namespace

TEST_CASE("cross products: basis cases and cofactor oracle") {
  // e1 x e2 = e^3, dual e^1 x e^2 = e_3
  Covec3 c = cross_vv(basis_vec(0), basis_vec(1));
  CHECK(c[2] == doctest::Approx(1.0));
  CHECK(std::abs(c[0]) + std::abs(c[1]) == doctest::Approx(0.0));
  Vec3 v = cross_cc(basis_covec(0), basis_covec(1));
  CHECK(v[2] == doctest::Approx(1.0));

  // antisymmetry: v x v = 0
  Vec3 a{0.3, -1.2, 2.0};
  CHECK(cross_vv(a, a).norm() == doctest::Approx(0.0));
  Covec3 p{1.5, 0.2, -0.7};
  CHECK(cross_cc(p, p).norm() == doctest::Approx(0.0));

  // frozen derived values
  Covec3 r = cross_vv(Vec3{1, 2, 3}, Vec3{4, 5, 6});
  CHECK(r[0] == doctest::Approx(-3));
  CHECK(r[1] == doctest::Approx(6));
  CHECK(r[2] == doctest::Approx(-3));
  Vec3 s = cross_cc(Covec3{1, 0, 2}, Covec3{0, 3, 1});
  CHECK(s[0] == doctest::Approx(-6));
  CHECK(s[1] == doctest::Approx(-1));
  CHECK(s[2] == doctest::Approx(3));

  // random agreement with the cofactor oracle
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    Vec3 x = rng.vec3(), y = rng.vec3();
    CHECK((cross_vv(x, y) - cross_vv_oracle(x, y)).norm() < 1e-14);
  }
}

TEST_CASE("cross product annihilates its arguments and is SL3-equivariant") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    Vec3 v = rng.vec3(), w = rng.vec3();
    Covec3 c = cross_vv(v, w);
    CHECK(std::abs(c * v) < 1e-12 * (1 + c.norm() * v.norm()));
    CHECK(std::abs(c * w) < 1e-12 * (1 + c.norm() * w.norm()));
    Mat3 g = rng.sl3_group();
    // (gv) x (gw) = (v x w) g^{-1}
    Covec3 lhs = cross_vv(g * v, g * w);
    Covec3 rhs = cross_vv(v, w) * g.inverse();
    CHECK((lhs - rhs).norm() < 1e-10 * (1 + rhs.norm()));
  }
}

TEST_CASE("mat_exp: identity, nilpotent closed form, group law") {
  Mat3 y;
  y(0, 1) = 2.0;
  y(1, 2) = -0.5;
  CHECK((mat_exp(y, 0.0) - Mat3::identity()).max_abs() < 1e-15);

  // strictly upper-triangular: exp(tN) = I + tN + t^2 N^2 / 2
  double t = 0.7;
  Mat3 expected = Mat3::identity() + t * y + (t * t / 2) * (y * y);
  CHECK((mat_exp(y, t) - expected).max_abs() < 1e-14);

  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    Mat3 a = rng.sl3();
    double s = rng.uniform(-1.5, 1.5), u = rng.uniform(-1.5, 1.5);
    Mat3 lhs = mat_exp(a, s + u);
    Mat3 rhs = mat_exp(a, s) * mat_exp(a, u);
    CHECK((lhs - rhs).max_abs() < 1e-10 * (1 + rhs.max_abs()));
    CHECK(mat_exp(a, s).det() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("mat_exp matches the eigendecomposition oracle on Y1(a=1)") {
  Mat3 y1;
  y1(0, 0) = 1;
  y1(0, 2) = 1;
  y1(1, 1) = -1;
  y1(1, 2) = 1;
  y1(2, 0) = 1;
  y1(2, 1) = -1;
  double t = 0.3;
  Eigen::Matrix3cd e = to_eigen(y1).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(e);
  Eigen::Matrix3cd d = Eigen::Matrix3cd::Zero();
  for (int i = 0; i < 3; ++i) d(i, i) = std::exp(t * es.eigenvalues()(i));
  Eigen::Matrix3cd oracle = es.eigenvectors() * d * es.eigenvectors().inverse();
  Mat3 got = mat_exp(y1, t);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(oracle(i, j).imag()) < 1e-12);
      CHECK(got(i, j) == doctest::Approx(oracle(i, j).real()).epsilon(1e-12));
    }
}

TEST_CASE("projective representatives and incidence") {
  ProjPoint q(Vec3{0, 0, -2});
  CHECK(q.rep[2] == doctest::Approx(1.0));  // sign rule flips, unit norm
  ProjLine l(Covec3{3, 0, 0});
  CHECK(l.rep[0] == doctest::Approx(1.0));
  CHECK(incident(q, l));
  CHECK(proj_dist(q, ProjPoint(Vec3{0, 0, 5})) < 1e-15);
}

TEST_CASE("cross-ratio: k-lemma, affine chart, degeneracies, invariance") {
  // a3 = a1 + a2, a4 = 2 a1 + a2 -> 2
  Vec3 a1{1, 0, 1}, a2{0, 1, 1};
  ProjPoint p1(a1), p2(a2), p3(a1 + a2), p4(2 * a1 + a2);
  Quadruple qd = Quadruple::on_common_line({p1, p2, p3, p4});
  CHECK(cross_ratio(qd) == doctest::Approx(2.0).epsilon(1e-12));

  // affine coordinates 0,1,2,3 on the line y = 0 -> 4/3
  auto pt = [](double x) { return ProjPoint(Vec3{x, 0, 1}); };
  Quadruple qd2 = Quadruple::on_common_line({pt(0), pt(1), pt(2), pt(3)});
  CHECK(cross_ratio(qd2) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // coincident points rejected
  CHECK_THROWS_AS(Quadruple::on_common_line({pt(0), pt(1), pt(2), pt(2)}), std::invalid_argument);
  // non-collinear rejected
  CHECK_THROWS_AS(Quadruple({pt(0), pt(1), pt(2), ProjPoint(Vec3{1, 1, 1})},
                            join(pt(0), pt(1))),
                  std::invalid_argument);

  // invariance under projectivized SL3 elements
  Rng rng(5);
  for (int it = 0; it < 50; ++it) {
    double x[4];
    for (int i = 0; i < 4; ++i) x[i] = rng.uniform(-2, 2);
    bool distinct = true;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (std::abs(x[i] - x[j]) < 0.05) distinct = false;
    if (!distinct) {
      --it;
      continue;
    }
    std::array<ProjPoint, 4> pts{pt(x[0]), pt(x[1]), pt(x[2]), pt(x[3])};
    double cr = cross_ratio(Quadruple::on_common_line(pts));
    Mat3 g = rng.sl3_group();
    std::array<ProjPoint, 4> gpts{ProjPoint(g * pts[0].rep), ProjPoint(g * pts[1].rep),
                                  ProjPoint(g * pts[2].rep), ProjPoint(g * pts[3].rep)};
    double cr2 = cross_ratio(Quadruple::on_common_line(gpts));
    CHECK(std::abs(cr - cr2) < 1e-9 * (1 + std::abs(cr)));
  }
}

TEST_CASE("join/meet duality") {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    ProjPoint a(rng.vec3()), b(rng.vec3());
    if (proj_dist(a, b) < 0.1) {
      --i;
      continue;
    }
    ProjLine l = join(a, b);
    CHECK(incident(a, l));
    CHECK(incident(b, l));
  }
}
