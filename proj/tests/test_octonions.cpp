/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dancing/cartan_engel.hpp"
#include "dancing/numeric.hpp"
#include "dancing/octonions.hpp"

using namespace dancing;

namespace {

ZornOctonion random_zorn(Rng& rng) { return {rng.normal(), rng.vec3(), rng.covec3(), rng.normal()}; }

// J-form on the imaginary part, polarized: B(z, z') with J(z) = x^2 - pq
double jform(const ZornOctonion& a, const ZornOctonion& b) {
  double xa = 0.5 * (a.x - a.y), xb = 0.5 * (b.x - b.y);
  return xa * xb - 0.5 * (a.p * b.q + b.p * a.q);
}

}  // namespace

TEST_CASE("zorn_mul: unit, square-zero element, norm identity") {
  ZornOctonion I = ZornOctonion::unit();
  CHECK((zorn_mul(I, I) - I).norm_inf() < 1e-15);

  ZornOctonion z(0, basis_vec(0), Covec3(), 0);
  CHECK(zorn_mul(z, z).norm_inf() < 1e-15);

  ZornOctonion w(1, basis_vec(0), basis_covec(1), 2);
  ZornOctonion prod = zorn_mul(w, zorn_conj(w));
  CHECK((prod - 2.0 * ZornOctonion::unit()).norm_inf() < 1e-14);
  CHECK(zorn_norm(w) == doctest::Approx(2.0));
}

TEST_CASE("conjugation: involution, antihomomorphism, norm") {
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    ZornOctonion a = random_zorn(rng), b = random_zorn(rng);
    CHECK((zorn_conj(zorn_conj(a)) - a).norm_inf() < 1e-15);
    ZornOctonion lhs = zorn_conj(zorn_mul(a, b));
    ZornOctonion rhs = zorn_mul(zorn_conj(b), zorn_conj(a));
    CHECK((lhs - rhs).norm_inf() < 1e-12 * (1 + rhs.norm_inf()));
    ZornOctonion ni = zorn_mul(a, zorn_conj(a)) - zorn_norm(a) * ZornOctonion::unit();
    CHECK(ni.norm_inf() < 1e-12 * (1 + std::abs(zorn_norm(a))));
  }
  ZornOctonion w(1, basis_vec(0), basis_covec(0), 3);
  CHECK(zorn_norm(w) == doctest::Approx(4.0));
}

TEST_CASE("zorn_mul is neither commutative nor associative but is bilinear") {
  Rng rng(17);
  double worst_comm = 0, worst_assoc = 0;
  for (int i = 0; i < 10; ++i) {
    ZornOctonion a = random_zorn(rng), b = random_zorn(rng), c = random_zorn(rng);
    worst_comm = std::max(worst_comm, (zorn_mul(a, b) - zorn_mul(b, a)).norm_inf());
    worst_assoc = std::max(
        worst_assoc, (zorn_mul(zorn_mul(a, b), c) - zorn_mul(a, zorn_mul(b, c))).norm_inf());
    // bilinearity
    ZornOctonion lhs = zorn_mul(a + b, c);
    ZornOctonion rhs = zorn_mul(a, c) + zorn_mul(b, c);
    CHECK((lhs - rhs).norm_inf() < 1e-12 * (1 + rhs.norm_inf()));
  }
  CHECK(worst_comm > 0.1);
  CHECK(worst_assoc > 0.01);
}

TEST_CASE("derivations kill the unit and act linearly on the sl3 part") {
  Rng rng(23);
  G2Param g(rng.sl3(), rng.vec3(), rng.covec3());
  CHECK(derivation_apply(g, ZornOctonion::unit()).norm_inf() < 1e-15);

  G2Param ga(rng.sl3(), Vec3(), Covec3());
  ZornOctonion z = random_zorn(rng);
  ZornOctonion out = derivation_apply(ga, z);
  CHECK(std::abs(out.x) < 1e-15);
  CHECK(std::abs(out.y) < 1e-15);
  CHECK((out.q - ga.A * z.q).norm() < 1e-14);
  CHECK((out.p - (-(z.p * ga.A))).norm() < 1e-14);
}

TEST_CASE("Leibniz property at 100 random triples") {
  Rng rng(29);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    G2Param g(rng.sl3(), rng.vec3(), rng.covec3());
    ZornOctonion a = random_zorn(rng), b = random_zorn(rng);
    ZornOctonion lhs = derivation_apply(g, zorn_mul(a, b));
    ZornOctonion rhs = zorn_mul(derivation_apply(g, a), b) + zorn_mul(a, derivation_apply(g, b));
    double scale = 1 + a.norm_inf() * b.norm_inf() * g.norm_inf();
    worst = std::max(worst, (lhs - rhs).norm_inf() / scale);
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("rho is antisymmetric for the form x^2 - pq on Im") {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    G2Param g(rng.sl3(), rng.vec3(), rng.covec3());
    ImOctonion za(rng.normal(), rng.vec3(), rng.covec3());
    ImOctonion zb(rng.normal(), rng.vec3(), rng.covec3());
    ZornOctonion da = derivation_apply(g, za.embed());
    ZornOctonion db = derivation_apply(g, zb.embed());
    double r = jform(da, zb.embed()) + jform(za.embed(), db);
    CHECK(std::abs(r) < 1e-12 * (1 + g.norm_inf() * (za.embed().norm_inf() + zb.embed().norm_inf())));
  }
}

TEST_CASE("rho7 matrix matches derivation_apply") {
  Rng rng(37);
  for (int i = 0; i < 20; ++i) {
    G2Param g(rng.sl3(), rng.vec3(), rng.covec3());
    ImOctonion z(rng.normal(), rng.vec3(), rng.covec3());
    Mat7 m = rho7(g);
    Eigen::Matrix<double, 7, 1> v;
    for (int k = 0; k < 3; ++k) v(k) = z.q[k];
    for (int k = 0; k < 3; ++k) v(3 + k) = z.p[k];
    v(6) = z.x;
    Eigen::Matrix<double, 7, 1> w = m * v;
    ZornOctonion d = derivation_apply(g, z.embed());
    for (int k = 0; k < 3; ++k) CHECK(w(k) == doctest::Approx(d.q[k]).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) CHECK(w(3 + k) == doctest::Approx(d.p[k]).epsilon(1e-12));
    CHECK(w(6) == doctest::Approx(d.x).epsilon(1e-12));
  }
}

TEST_CASE("g2_bracket: sl3 subalgebra, mixed bracket oracle, dimension 14") {
  Rng rng(41);
  // pure sl3 brackets stay pure
  Mat3 a = rng.sl3(), b = rng.sl3();
  G2Param g1(a, Vec3(), Covec3()), g2(b, Vec3(), Covec3());
  G2Param br = g2_bracket(g1, g2);
  CHECK((br.A - commutator(a, b)).max_abs() < 1e-12);
  CHECK(br.b.norm() < 1e-13);
  CHECK(br.c.norm() < 1e-13);

  // [ (0,e1,0), (0,0,e^1) ] against the raw 7x7 commutator oracle
  G2Param gb(Mat3(), basis_vec(0), Covec3());
  G2Param gc(Mat3(), Vec3(), basis_covec(0));
  Mat7 oracle = rho7(gb) * rho7(gc) - rho7(gc) * rho7(gb);
  G2Param mixed = g2_bracket(gb, gc);
  CHECK((rho7(mixed) - oracle).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(mixed.b.norm() < 1e-13);  // pure-A result
  CHECK(mixed.c.norm() < 1e-13);

  // span of basis + brackets has dimension 14 in parameter space
  auto basis = g2_basis();
  std::vector<G2Param> all = basis;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) all.push_back(g2_bracket(basis[i], basis[j]));
  Eigen::MatrixXd m(15, static_cast<int>(all.size()));
  for (int j = 0; j < m.cols(); ++j) {
    const G2Param& g = all[static_cast<std::size_t>(j)];
    for (int r = 0; r < 9; ++r) m(r, j) = g.A.m[r];
    for (int r = 0; r < 3; ++r) m(9 + r, j) = g.b[r];
    for (int r = 0; r < 3; ++r) m(12 + r, j) = g.c[r];
  }
  CHECK(numeric_rank(m) == 14);
}

TEST_CASE("Omega: Euler direction, kernel at the base cone point, cone rank 3") {
  // z on the null cone, dz = z -> 0
  Rng rng(43);
  for (int i = 0; i < 20; ++i) {
    // build a cone point: x^2 = pq
    Vec3 q = rng.vec3();
    Covec3 p = rng.covec3();
    double pq = p * q;
    if (pq <= 0.05) {
      --i;
      continue;
    }
    ImOctonion z(std::sqrt(pq), q, p);
    CHECK(std::abs(z.cone_form()) < 1e-12);
    CHECK(omega_at(z, z).norm_inf() < 1e-12 * (1 + z.embed().norm_inf()));
  }

  // at z = (0, e1; 0): kernel is {dp1 = dq2 = dq3 = dx = 0}, rank 3
  ImOctonion z0(0, basis_vec(0), Covec3());
  CHECK(omega_kernel_rank(z0) == 3);
  ImOctonion dz_in;  // dq = e1 direction and dp in e^2, e^3 all annihilate
  dz_in.q = basis_vec(0);
  dz_in.p = basis_covec(1) * 0.4 + basis_covec(2) * 1.1;
  CHECK(omega_at(z0, dz_in).norm_inf() < 1e-14);
  ImOctonion dz_out;
  dz_out.x = 1.0;
  CHECK(omega_at(z0, dz_out).norm_inf() > 0.5);

  // kernel rank exactly 3 at 100 random cone points
  for (int i = 0; i < 100; ++i) {
    Vec3 q = rng.vec3();
    Covec3 p = rng.covec3();
    double pq = p * q;
    if (pq <= 0.05) {
      --i;
      continue;
    }
    ImOctonion z(std::sqrt(pq), q, p);
    CHECK(omega_kernel_rank(z) == 3);
  }

  // generic non-cone point: kernel rank 0 or 1 (reported, not asserted)
  ImOctonion zg(1.3, Vec3{0.2, -0.4, 1.0}, Covec3{0.7, 0.1, -0.3});
  int r = omega_kernel_rank(zg);
  CHECK(r <= 1);
}

TEST_CASE("iota pullback annihilates exactly the distribution plane") {
  // v in D at (e3, e^3)
  Q5Point pt(basis_vec(2), basis_covec(2));
  auto [f1, f2] = dist_frame(pt);
  CHECK(iota_pullback(pt.q, pt.p, f1.dq, f1.dp).norm() < 1e-12);
  CHECK(iota_pullback(pt.q, pt.p, f2.dq, f2.dp).norm() < 1e-12);

  // fiber direction (q, -p): nonzero diagonal entries, reported componentwise
  IotaPullback fib = iota_pullback(pt.q, pt.p, pt.q, -1.0 * pt.p);
  CHECK(std::abs(fib.top_left) == doctest::Approx(1.0));
  CHECK(std::abs(fib.bottom_right) == doctest::Approx(1.0));

  // random non-D tangents give residual bounded away from zero
  Rng rng(47);
  for (int i = 0; i < 50; ++i) {
    Vec3 q = rng.vec3();
    Covec3 p = rng.covec3();
    double pq = p * q;
    if (std::abs(pq) < 0.2) {
      --i;
      continue;
    }
    Q5Point x(q, p / pq);
    // tangent to Q5 but generic: dq random, dp adjusted to satisfy tangency
    Vec3 dq = rng.vec3();
    Covec3 dp = rng.covec3();
    double corr = dp * x.q + x.p * dq;
    dp = dp - corr * x.p;  // p q = 1 so this fixes tangency
    double res = iota_pullback(x.q, x.p, dq, dp).norm();
    Covec3 ann = annihilator_form(x.q, FlowVec{dq, dp});
    if (ann.norm() > 1e-2) CHECK(res > 1e-3);
  }
}

TEST_CASE("zorn_mul is equivariant under the SL3 embedding into Aut") {
  Rng rng(53);
  auto act = [](const Mat3& g, const ZornOctonion& z) {
    return ZornOctonion{z.x, g * z.q, z.p * g.inverse(), z.y};
  };
  for (int i = 0; i < 50; ++i) {
    Mat3 g = rng.sl3_group();
    ZornOctonion a = random_zorn(rng), b = random_zorn(rng);
    ZornOctonion lhs = zorn_mul(act(g, a), act(g, b));
    ZornOctonion rhs = act(g, zorn_mul(a, b));
    CHECK((lhs - rhs).norm_inf() < 1e-11 * (1 + rhs.norm_inf()));
  }
}
