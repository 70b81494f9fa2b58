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

using namespace dancing;

namespace {

Q5Point random_q5(Rng& rng) {
  for (;;) {
    Vec3 q = rng.vec3();
    Covec3 p = rng.covec3();
    double pq = p * q;
    if (std::abs(pq) > 0.2) return Q5Point(q, p / pq);
  }
}

// finite-difference directional derivative of a polynomial field
FlowVec fd_deriv(const PolyField& f, const Vec3& q, const Covec3& p, const FlowVec& d,
                 double h = 1e-5) {
  FlowVec plus = f.value(q + h * d.dq, p + h * d.dp);
  FlowVec minus = f.value(q - h * d.dq, p - h * d.dp);
  return (1.0 / (2 * h)) * (plus - minus);
}

const Mat3 kY1 = [] {
  Mat3 y;
  y(0, 0) = 1;
  y(0, 2) = 1;
  y(1, 1) = -1;
  y(1, 2) = 1;
  y(2, 0) = 1;
  y(2, 1) = -1;
  return y;
}();

}  // namespace

TEST_CASE("Q5Point/Q5Tangent invariants") {
  CHECK_THROWS_AS(Q5Point(basis_vec(2), basis_covec(0)), std::invalid_argument);  // pq = 0
  Q5Point pt(basis_vec(2), basis_covec(2));
  CHECK_THROWS_AS(Q5Tangent(pt, basis_vec(2), Covec3()), std::invalid_argument);  // d(pq) != 0
}

TEST_CASE("dist_frame at the base point matches the displayed kernel") {
  Q5Point pt(basis_vec(2), basis_covec(2));
  auto [f1, f2] = dist_frame(pt);
  // kernel equations: dp1 + dq2 = dp2 - dq1 = dp3 = 0 and tangency dq3 = 0
  for (const Q5Tangent* f : {&f1, &f2}) {
    CHECK(std::abs(f->dp[0] + f->dq[1]) < 1e-13);
    CHECK(std::abs(f->dp[1] - f->dq[0]) < 1e-13);
    CHECK(std::abs(f->dp[2]) < 1e-13);
    CHECK(std::abs(f->dq[2]) < 1e-13);
  }
  // independence
  Eigen::MatrixXd m(6, 2);
  for (int i = 0; i < 3; ++i) {
    m(i, 0) = f1.dq[i];
    m(3 + i, 0) = f1.dp[i];
    m(i, 1) = f2.dq[i];
    m(3 + i, 1) = f2.dp[i];
  }
  CHECK(numeric_rank(m) == 2);
}

TEST_CASE("frame annihilates both omega and the dual form dq + p x dp") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    Q5Point pt = random_q5(rng);
    auto [f1, f2] = dist_frame(pt);
    for (const Q5Tangent* f : {&f1, &f2}) {
      FlowVec v{f->dq, f->dp};
      CHECK(annihilator_form(pt.q, v).norm() < 1e-13 * (1 + v.norm()));
      Vec3 dual = f->dq + cross_cc(pt.p, f->dp);
      CHECK(dual.norm() < 1e-12 * (1 + v.norm()));
    }
  }
}

TEST_CASE("closed-form field derivatives agree with central differences") {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    Q5Point pt = random_q5(rng);
    FlowVec d{rng.vec3(), rng.covec3()};
    for (int w = 0; w < 3; ++w) {
      PolyField f = make_frame_poly(w);
      FlowVec a = f.deriv(pt.q, pt.p, d);
      FlowVec b = fd_deriv(f, pt.q, pt.p, d);
      CHECK((a - b).norm() < 1e-7 * (1 + a.norm()));
    }
    G2Param g(rng.sl3(), rng.vec3(), rng.covec3());
    PolyField x = make_symmetry_poly(g);
    FlowVec a = x.deriv(pt.q, pt.p, d);
    FlowVec b = fd_deriv(x, pt.q, pt.p, d);
    CHECK((a - b).norm() < 1e-6 * (1 + a.norm()));
  }
}

TEST_CASE("growth vector is (2,3,5) at the base point and 100 random points") {
  Q5Point base(basis_vec(2), basis_covec(2));
  CHECK(growth_vector(base) == GrowthVector{2, 3, 5});
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    CHECK(growth_vector(random_q5(rng)) == GrowthVector{2, 3, 5});
  }
}

TEST_CASE("symmetry fields: examples and tangency") {
  Rng rng(8);
  // g = (A,0,0) gives the infinitesimal linear action (Aq, -pA)
  for (int i = 0; i < 10; ++i) {
    Mat3 a = rng.sl3();
    Q5Point pt = random_q5(rng);
    Q5Tangent t = symmetry_field(G2Param(a, Vec3(), Covec3()), pt);
    CHECK((t.dq - a * pt.q).norm() < 1e-13);
    CHECK((t.dp - (-(pt.p * a))).norm() < 1e-13);
  }
  // g = (0, e1, 0) at (e3, e^3): dq = 2b = (2,0,0), dp = e1 x e3 = -e^2.
  // (The b x q term is pinned by the derivation matrix: with q x b instead the
  // field fails the frame-bracket test by O(1), see the residual test below.)
  Q5Point base(basis_vec(2), basis_covec(2));
  Q5Tangent t = symmetry_field(G2Param(Mat3(), basis_vec(0), Covec3()), base);
  CHECK(t.dq[0] == doctest::Approx(2));
  CHECK(std::abs(t.dq[1]) + std::abs(t.dq[2]) < 1e-15);
  CHECK(t.dp[1] == doctest::Approx(-1));
  CHECK(std::abs(t.dp[0]) + std::abs(t.dp[2]) < 1e-15);
  // d(pq)(X) = 0 for 100 random (g, pt) -- the Q5Tangent constructor asserts it,
  // checked explicitly here
  for (int i = 0; i < 100; ++i) {
    G2Param g(rng.sl3(), rng.vec3(), rng.covec3());
    Q5Point pt = random_q5(rng);
    FlowVec v = symmetry_field_raw(g, pt.q, pt.p);
    CHECK(std::abs(v.dp * pt.q + pt.p * v.dq) < 1e-12 * (1 + v.norm()));
  }
}

TEST_CASE("symmetry residual: 14 basis fields pass, negative control fails") {
  auto basis = g2_basis();
  for (const auto& g : basis) {
    Rng rng(100);
    CHECK(symmetry_residual(g, rng) < 1e-9);
  }
  // X = (q, 0) is not a symmetry
  PolyField bad;
  bad.value = [](const Vec3& q, const Covec3&) -> FlowVec { return {q, Covec3()}; };
  bad.deriv = [](const Vec3&, const Covec3&, const FlowVec& d) -> FlowVec {
    return {d.dq, Covec3()};
  };
  Rng rng(100);
  CHECK(symmetry_residual_field(bad, rng) > 1e-2);
  // g = 0 gives residual 0
  Rng rng2(100);
  CHECK(symmetry_residual(G2Param(), rng2) == doctest::Approx(0.0));
}

TEST_CASE("bracket of symmetry fields equals the field of the parameter bracket") {
  // The parametrization realizes a left action, so the field bracket reverses
  // the parameter bracket: [X_{g1}, X_{g2}] = X_{[g2, g1]}.
  Rng rng(12);
  auto basis = g2_basis();
  for (int it = 0; it < 20; ++it) {
    std::size_t i = static_cast<std::size_t>(rng.uniform(0, static_cast<double>(basis.size())));
    std::size_t j = static_cast<std::size_t>(rng.uniform(0, static_cast<double>(basis.size())));
    if (i == j) {
      --it;
      continue;
    }
    PolyField xi = make_symmetry_poly(basis[i]);
    PolyField xj = make_symmetry_poly(basis[j]);
    PolyField br = lie_bracket_field(xi, xj);
    PolyField direct = make_symmetry_poly(g2_bracket(basis[j], basis[i]));
    Q5Point pt = random_q5(rng);
    // compare jets: values and first derivatives
    FlowVec dv = br.value(pt.q, pt.p) - direct.value(pt.q, pt.p);
    CHECK(dv.norm() < 1e-8 * (1 + direct.value(pt.q, pt.p).norm()));
    FlowVec d{rng.vec3(), rng.covec3()};
    FlowVec dd = br.deriv(pt.q, pt.p, d) - direct.deriv(pt.q, pt.p, d);
    CHECK(dd.norm() < 1e-8 * (1 + d.norm()));
  }
}

TEST_CASE("algebra dimension: full basis 14, sl3 part 8, single field 1") {
  CHECK(algebra_dimension() == 14);
  auto basis = g2_basis();
  std::vector<G2Param> sl3only(basis.begin(), basis.begin() + 8);
  CHECK(algebra_dimension(sl3only) == 8);
  std::vector<G2Param> one = {basis[0]};
  CHECK(algebra_dimension(one) == 1);
}

TEST_CASE("integrate: zero control is constant, conserved quantity holds") {
  Q5Point pt(Vec3{0.3, -0.5, 1.2}, Covec3{0.1, 0.4, 1.0 / 1.2 - (0.1 * 0.3 + 0.4 * (-0.5)) / 1.2});
  Q5Point pt0(pt.q, pt.p * (1.0 / (pt.p * pt.q)));
  Q5Trajectory traj = integrate(pt0, [](double) { return Vec3(); }, 0, 1, 1e-10, 101);
  for (const auto& s : traj.samples) {
    CHECK((s.q - pt0.q).norm() < 1e-12);
    CHECK((s.p - pt0.p).norm() < 1e-12);
  }

  // random smooth control over [0, 10]
  Rng rng(14);
  Vec3 a = rng.vec3(0.4), b = rng.vec3(0.4), c = rng.vec3(0.4);
  Control u = [a, b, c](double t) {
    return std::cos(t) * a + std::sin(0.7 * t) * b + std::cos(1.3 * t + 0.4) * c;
  };
  Q5Trajectory tr = integrate(random_q5(rng), u, 0, 10, 1e-10, 2001);
  CHECK(tr.max_constraint_drift < 1e-10);
  CHECK(tr.midpoint_residual() < 1e-9);
}

TEST_CASE("integrate matches the matrix-exponential orbit oracle for Y1(a=1)") {
  // horizontal control: the q-velocity of the orbit through (e3, e^3)
  Q5Point base(basis_vec(2), basis_covec(2));
  Control u = [](double t) {
    Mat3 e = mat_exp(kY1, t);
    return kY1 * (e * basis_vec(2));
  };
  Q5Trajectory tr = integrate(base, u, 0, 1, 1e-12, 501);
  double worst = 0;
  for (const auto& s : tr.samples) {
    Mat3 e = mat_exp(kY1, s.t);
    Vec3 q_exact = e * basis_vec(2);
    Covec3 p_exact = basis_covec(2) * mat_exp(kY1, -s.t);
    worst = std::max(worst, (s.q - q_exact).norm() + (s.p - p_exact).norm());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("rescaling (q,p) -> (lam q, lam^2 p) maps solutions across level sets") {
  // D-membership is preserved by the rescaling (the level changes to lam^3)
  Rng rng(16);
  double lam = 2.0;
  for (int i = 0; i < 30; ++i) {
    Q5Point pt = random_q5(rng);
    auto [f1, f2] = dist_frame(pt);
    for (const Q5Tangent* f : {&f1, &f2}) {
      Vec3 dq = lam * f->dq;
      Covec3 dp = (lam * lam) * f->dp;
      Covec3 resid = dp - cross_vv(lam * pt.q, dq);
      CHECK(resid.norm() < 1e-8 * (1 + dp.norm()));
    }
  }
  // and on an integrated solution: the rescaled path solves the same equations
  Vec3 a = rng.vec3(0.3);
  Control u = [a](double t) { return std::cos(t) * a; };
  Q5Trajectory tr = integrate(random_q5(rng), u, 0, 2, 1e-11, 801);
  double h = tr.samples[1].t - tr.samples[0].t;
  std::vector<double> comp(tr.samples.size());
  double worst = 0;
  std::vector<Vec3> dq(tr.samples.size());
  std::vector<Covec3> dp(tr.samples.size());
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < tr.samples.size(); ++i) comp[i] = lam * tr.samples[i].q[c];
    for (std::size_t i = 3; i + 3 < tr.samples.size(); ++i) dq[i][c] = stencil7(comp, i, h).d1;
    for (std::size_t i = 0; i < tr.samples.size(); ++i) comp[i] = lam * lam * tr.samples[i].p[c];
    for (std::size_t i = 3; i + 3 < tr.samples.size(); ++i) dp[i][c] = stencil7(comp, i, h).d1;
  }
  for (std::size_t i = 3; i + 3 < tr.samples.size(); ++i) {
    Covec3 defect = dp[i] - cross_vv(lam * tr.samples[i].q, dq[i]);
    worst = std::max(worst, defect.norm() / (1 + dq[i].norm() + dp[i].norm()));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("fiber action preserves the constraint (and not the distribution)") {
  Rng rng(18);
  double lam = 1.7;
  for (int i = 0; i < 20; ++i) {
    Q5Point pt = random_q5(rng);
    Vec3 q2 = lam * pt.q;
    Covec3 p2 = pt.p / lam;
    CHECK(std::abs(p2 * q2 - 1.0) < 1e-12);
  }
}

TEST_CASE("trajectory CSV header") {
  Q5Point pt(basis_vec(2), basis_covec(2));
  Q5Trajectory tr = integrate(pt, [](double) { return Vec3(); }, 0, 0.1, 1e-10, 11);
  std::string csv = trajectory_csv(tr);
  CHECK(csv.rfind("t,q1,q2,q3,p1,p2,p3\n", 0) == 0);
}
