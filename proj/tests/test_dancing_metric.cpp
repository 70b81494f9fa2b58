/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>

#include "dancing/dancing_metric.hpp"
#include "dancing/numeric.hpp"

using namespace dancing;

namespace {

M4Tangent random_tangent(Rng& rng, const Vec3& qhat, const Covec3& phat) {
  return {qhat, phat, rng.vec3(), rng.covec3()};
}

// base point with pq = 1 lifts
void random_base(Rng& rng, Vec3& qhat, Covec3& phat) {
  for (;;) {
    Vec3 q = rng.vec3();
    Covec3 p = rng.covec3();
    double pq = p * q;
    if (std::abs(pq) > 0.25) {
      qhat = q;
      phat = p / pq;
      return;
    }
  }
}

PlaneCurve envelope_circle_sqrt2() {
  // [sqrt2 cos(t + pi/4), sqrt2 sin(t + pi/4), 1]
  return PlaneCurve::from_exact([](double t) {
    CurveJets j;
    double s2 = std::sqrt(2.0);
    double c = std::cos(t + M_PI / 4), s = std::sin(t + M_PI / 4);
    Vec3 cyc[4] = {{s2 * c, s2 * s, 0}, {-s2 * s, s2 * c, 0}, {-s2 * c, -s2 * s, 0}, {s2 * s, -s2 * c, 0}};
    j[0] = {s2 * c, s2 * s, 1};
    for (int k = 1; k < 7; ++k) j[static_cast<std::size_t>(k)] = cyc[k % 4];
    return j;
  });
}

}  // namespace

TEST_CASE("point types enforce non-incidence") {
  CHECK_THROWS_AS(M4Point(ProjPoint(Vec3{1, 0, 0}), ProjLine(Covec3{0, 1, 0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(ChartPoint(1.0, 2.0, 1.0, 1.0), std::invalid_argument);  // y = ax + b
  CHECK_NOTHROW(ChartPoint(0, 0, 0, 1));
}

TEST_CASE("metric_eval: factor directions are null, two formulas agree, gauge-free") {
  Vec3 q = basis_vec(2);
  Covec3 p = basis_covec(2);
  M4Tangent u{q, p, basis_vec(0), Covec3()};
  CHECK(metric_norm2(u) == doctest::Approx(0.0));
  M4Tangent w{q, p, Vec3(), basis_covec(0)};
  CHECK(metric_norm2(w) == doctest::Approx(0.0));

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Vec3 qh;
    Covec3 ph;
    random_base(rng, qh, ph);
    M4Tangent u1 = random_tangent(rng, qh, ph);
    M4Tangent u2 = random_tangent(rng, qh, ph);
    double g1 = metric_eval(u1, u2);
    double g2 = metric_eval_bis(u1, u2);
    CHECK(std::abs(g1 - g2) < 1e-12 * (1 + std::abs(g1)));
    // gauge independence
    M4Tangent u1g = u1;
    u1g.dq = u1.dq + rng.normal() * qh;
    u1g.dp = u1.dp + rng.normal() * ph;
    CHECK(metric_eval(u1g, u2) == doctest::Approx(g1).epsilon(1e-11));
    // symmetry and bilinearity spot checks
    CHECK(metric_eval(u2, u1) == doctest::Approx(g1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(metric_eval(u, M4Tangent{2.0 * q, p, Vec3(), Covec3()}), std::invalid_argument);
}

TEST_CASE("metric_chart: base example, signature (2,2), chart/homogeneous agreement") {
  auto g = metric_chart(ChartPoint(0, 0, 0, 1));
  CHECK(g[0][2] == doctest::Approx(-1.0));
  CHECK(g[2][0] == doctest::Approx(-1.0));
  CHECK(g[1][3] == doctest::Approx(-1.0));
  CHECK(g[3][1] == doctest::Approx(-1.0));
  double off = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!((i == 0 && j == 2) || (i == 2 && j == 0) || (i == 1 && j == 3) || (i == 3 && j == 1)))
        off += std::abs(g[i][j]);
  CHECK(off == doctest::Approx(0.0));

  Rng rng(7);
  int done = 0;
  while (done < 100) {
    ChartPoint cp(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    if (std::abs(cp.y - cp.a * cp.x - cp.b) < 0.3) continue;
    ++done;
    auto gm = metric_chart(cp);
    Eigen::Matrix4d em;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) em(i, j) = gm[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(em);
    int pos = 0, neg = 0;
    for (int k = 0; k < 4; ++k) (es.eigenvalues()(k) > 0 ? pos : neg)++;
    CHECK(pos == 2);
    CHECK(neg == 2);
    CHECK(em.determinant() > 0);

    // agreement with the homogeneous formula through the chart lifts
    double dx = rng.normal(), dy = rng.normal(), da = rng.normal(), db = rng.normal();
    M4Tangent u = chart_tangent(cp, dx, dy, da, db);
    double ghom = metric_norm2(u);
    double gch = 0;
    double v[4] = {dx, dy, da, db};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) gch += gm[i][j] * v[i] * v[j];
    CHECK(std::abs(ghom - gch) < 1e-10 * (1 + std::abs(gch)));
  }
}

TEST_CASE("metric_eval is SL3-invariant") {
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    Vec3 qh;
    Covec3 ph;
    random_base(rng, qh, ph);
    M4Tangent u = random_tangent(rng, qh, ph);
    M4Tangent w = random_tangent(rng, qh, ph);
    double before = metric_eval(u, w);
    Mat3 gm = rng.sl3_group();
    Mat3 gi = gm.inverse();
    M4Tangent ug{gm * qh, ph * gi, gm * u.dq, u.dp * gi};
    M4Tangent wg{gm * qh, ph * gi, gm * w.dq, w.dp * gi};
    CHECK(std::abs(metric_eval(ug, wg) - before) < 1e-10 * (1 + std::abs(before)));
  }
}

TEST_CASE("dancing condition: the circle and its concentric-sqrt2 partner") {
  PlaneCurve q_curve = PlaneCurve::circle();
  PlaneCurve p_curve = envelope_circle_sqrt2().dual();  // lines tangent to the envelope
  for (double t : {-1.0, -0.3, 0.0, 0.7, 2.1}) {
    CHECK(dancing_residual(q_curve, p_curve, t) < 1e-13);
    // non-incidence of the pair itself
    CurveJets qa = q_curve.jets(t);
    CurveJets pa = p_curve.jets(t);
    Covec3 p0{pa[0][0], pa[0][1], pa[0][2]};
    CHECK(std::abs(p0 * qa[0]) > 1e-3 * p0.norm() * qa[0].norm());
  }
}

TEST_CASE("dancing residual vanishes exactly with the metric") {
  // residual and g(v,v) are proportional through known positive factors
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Vec3 qh;
    Covec3 ph;
    random_base(rng, qh, ph);
    M4Tangent v = random_tangent(rng, qh, ph);
    Covec3 qstar = cross_vv(qh, v.dq);
    Vec3 pstar = cross_cc(ph, v.dp);
    if (qstar.norm() < 0.05 || pstar.norm() < 0.05) {
      --i;
      continue;
    }
    double g = metric_norm2(v);
    double resid = std::abs(qstar * pstar) / (qstar.norm() * pstar.norm());
    double pq = ph * qh;
    double expect = std::abs(g) * pq * pq / (2 * qstar.norm() * pstar.norm());
    CHECK(resid == doctest::Approx(expect).epsilon(1e-10));
  }
  // a generic unrelated pair stays away from zero
  PlaneCurve q_curve = PlaneCurve::circle();
  PlaneCurve bad_envelope = PlaneCurve::from_exact([](double t) {
    CurveJets j;
    double c = std::cos(0.7 * t + 0.3), s = std::sin(0.7 * t + 0.3);
    j[0] = {2 * c + 0.5, s, 1};
    Vec3 cyc[4] = {{2 * c, s, 0}, {-2 * s, c, 0}, {-2 * c, -s, 0}, {2 * s, -c, 0}};
    double w = 1;
    for (int k = 1; k < 7; ++k) {
      w *= 0.7;
      j[static_cast<std::size_t>(k)] = w * cyc[k % 4];
    }
    return j;
  });
  double r = dancing_residual(q_curve, bad_envelope.dual(), 0.4);
  CHECK(r > 1e-2);
}

TEST_CASE("cross-ratio formula recovers the metric") {
  Rng rng(13);
  int done = 0;
  while (done < 20) {
    Vec3 qh;
    Covec3 ph;
    random_base(rng, qh, ph);
    M4Tangent v = random_tangent(rng, qh, ph);
    // normalize the probe scale; the epsilon expansion has O(1) coefficients
    // only for O(1) velocities
    double s = 1.0 / (v.dq.norm() + v.dp.norm() + 1e-30);
    v.dq = s * v.dq;
    v.dp = s * v.dp;
    double g = metric_norm2(v);
    if (std::abs(g) < 0.02) continue;
    ++done;
    double e1 = 1e-2, e2 = 5e-3, e3 = 2.5e-3;
    double c1 = cross_ratio_metric(v, e1);
    double c2 = cross_ratio_metric(v, e2);
    double c3 = cross_ratio_metric(v, e3);
    // |CR - (1/2) eps^2 g| = O(eps^3): consecutive defects shrink ~8x
    double d1 = std::abs(c1 - 0.5 * e1 * e1 * g);
    double d3 = std::abs(c3 - 0.5 * e3 * e3 * g);
    if (d3 > 1e-15) {
      double rate = std::log2(d1 / d3) / 2.0;
      CHECK(rate > 2.5);
    }
    // two-level Richardson extrapolation of 2 CR / eps^2 recovers g to 1e-5
    double r1 = 2 * c1 / (e1 * e1), r2 = 2 * c2 / (e2 * e2), r3 = 2 * c3 / (e3 * e3);
    double extrap = (8 * r3 - 6 * r2 + r1) / 3.0;
    CHECK(std::abs(extrap - g) < 1e-5 * (1 + std::abs(g)));
  }

  // null tangent along a curved null curve: CR / eps^2 -> 0
  Vec3 qh;
  Covec3 ph;
  random_base(rng, qh, ph);
  ContactElement ce{qh, ph, 1.0};
  Vec3 dir = rng.vec3();
  M4Tangent nullv = ce.graph_tangent(dir);
  CHECK(std::abs(metric_norm2(nullv)) < 1e-12);
  Vec3 w = rng.vec3();
  Covec3 r = rng.covec3();
  auto q_of = [&](double s) { return qh + s * nullv.dq + (0.5 * s * s) * w; };
  auto p_of = [&](double s) { return ph + s * nullv.dp + (0.5 * s * s) * r; };
  double a = std::abs(cross_ratio_metric(q_of, p_of, 0.0, 1e-2)) / 1e-4;
  double b = std::abs(cross_ratio_metric(q_of, p_of, 0.0, 2.5e-3)) / 6.25e-6;
  CHECK(b < 0.5 * a);
}

TEST_CASE("dual curves: double duality, circle tangency, inflection flags") {
  PlaneCurve circ = PlaneCurve::circle();
  DualCurveResult d = dual_curve(circ);
  // defining identities: q* . q = q* . q' = 0
  for (double t : {-0.5, 0.2, 1.0}) {
    CurveJets a = circ.jets(t);
    CurveJets ds = d.curve.jets(t);
    Covec3 qs{ds[0][0], ds[0][1], ds[0][2]};
    CHECK(std::abs(qs * a[0]) < 1e-13);
    CHECK(std::abs(qs * a[1]) < 1e-13);
    CHECK(!d.singular_at(t));
  }
  // double duality returns the original curve projectively
  DualCurveResult dd = dual_curve(d.curve);
  for (double t : {-0.5, 0.2, 1.0}) {
    ProjPoint orig(circ.at(t));
    ProjPoint back(dd.curve.at(t));
    CHECK(proj_dist(orig, back) < 1e-9);
  }
  // cubic y = x^3 inflects at the origin
  PlaneCurve cubic = PlaneCurve::from_exact([](double t) {
    CurveJets j;
    j[0] = {t, t * t * t, 1};
    j[1] = {1, 3 * t * t, 0};
    j[2] = {0, 6 * t, 0};
    j[3] = {0, 6, 0};
    for (int k = 4; k < 7; ++k) j[static_cast<std::size_t>(k)] = Vec3();
    return j;
  });
  DualCurveResult dc = dual_curve(cubic);
  CHECK(dc.singular_at(0.0));
  CHECK(!dc.singular_at(0.5));
  // straight line: dual degenerates to a point
  PlaneCurve line = PlaneCurve::from_exact([](double t) {
    CurveJets j;
    j[0] = {t, 2 * t + 1, 1};
    j[1] = {1, 2, 0};
    for (int k = 2; k < 7; ++k) j[static_cast<std::size_t>(k)] = Vec3();
    return j;
  });
  CHECK_THROWS_AS(dual_curve(line), std::domain_error);
}

TEST_CASE("contact elements: antisymmetry, null graph, incidence, fiber action") {
  Rng rng(17);
  CHECK_THROWS_AS(contact_psi(M4Point(ProjPoint(basis_vec(2)), ProjLine(basis_covec(2))), 0.0),
                  std::invalid_argument);
  for (int i = 0; i < 20; ++i) {
    Vec3 qh;
    Covec3 ph;
    random_base(rng, qh, ph);
    ContactElement ce{qh, ph, rng.uniform(0.3, 2.0)};
    Vec3 v = rng.vec3();
    // psi(v)(v) = 0
    CHECK(std::abs(psi_apply(ce, v) * v) < 1e-13 * (1 + v.norm() * v.norm()));
    // graph vectors are null
    CHECK(std::abs(metric_norm2(ce.graph_tangent(v))) < 1e-12);
    // incidence: image point lies on both the line through q and on p
    Covec3 ell = cross_vv(qh, v);
    if (ell.norm() < 0.05) continue;
    ProjPoint img = contact_image_point(ce, v);
    CHECK(std::abs(ell * img.rep) < 1e-10);
    CHECK(std::abs(ce.phat * img.rep) < 1e-10);
  }

  // q5_to_contact at (e3, e^3): psi(e1) = e3 x e1 = e^2
  ContactElement ce = q5_to_contact(Q5Point(basis_vec(2), basis_covec(2)));
  Covec3 w = psi_apply(ce, basis_vec(0));
  CHECK(w[1] == doctest::Approx(1.0));
  CHECK(std::abs(w[0]) + std::abs(w[2]) == doctest::Approx(0.0));
  // psi kills the lift direction, so it descends to the tangent space
  CHECK(psi_apply(ce, ce.qhat).norm() == doctest::Approx(0.0));

  // fiber action corresponds to rescaling psi
  Rng rng2(19);
  Vec3 qh;
  Covec3 ph;
  random_base(rng2, qh, ph);
  double lam = 1.9;
  ContactElement up = q5_to_contact(Q5Point(lam * qh, ph / lam));
  ContactElement base = q5_to_contact(Q5Point(qh, ph));
  Vec3 v = rng2.vec3();
  // compare as maps on the SAME tangent space of RP^2 (mod qh): the image
  // covectors differ exactly by the factor lam modulo phat
  Covec3 a = psi_apply(up, v);
  Covec3 b = psi_apply(base, v);
  Covec3 diff = a - lam * b;
  // diff must be a multiple of phat (gauge direction)
  Vec3 cr = cross_cc(diff, ph);
  CHECK(cr.norm() < 1e-10 * (1 + a.norm()));
}

TEST_CASE("pushforward of the distribution is the graph of psi") {
  Rng rng(23);
  for (int i = 0; i < 30; ++i) {
    Vec3 qh;
    Covec3 ph;
    random_base(rng, qh, ph);
    Q5Point pt(qh, ph);
    ContactElement ce = q5_to_contact(pt);
    auto [f1, f2] = dist_frame(pt);
    for (const Q5Tangent* f : {&f1, &f2}) {
      // the dp-part equals psi(dq-part) exactly (both are q x v)
      Covec3 resid = f->dp - psi_apply(ce, f->dq);
      CHECK(resid.norm() < 1e-12 * (1 + f->dp.norm()));
    }
    // the dq-parts of the frame together with qhat span R^3, so the
    // pushforward fills the whole graph
    Mat3 span = Mat3::from_cols(f1.dq, f2.dq, qh);
    CHECK(std::abs(span.det()) > 1e-8);
  }
}
