/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_DANCING_METRIC_HPP
#define DANCING_DANCING_METRIC_HPP

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "dancing/cartan_engel.hpp"
#include "dancing/linalg.hpp"
#include "dancing/projective_curves.hpp"

// The space of non-incident point-line pairs with its split-signature metric:
// evaluation in homogeneous coordinates, the coordinate chart form, the
// nullity ("dancing") condition, the cross-ratio formula, duality/envelopes,
// and projective contact elements.

namespace dancing {

struct M4Point {
  ProjPoint q;
  ProjLine p;

  M4Point(const ProjPoint& q_, const ProjLine& p_) : q(q_), p(p_) {
    if (std::abs(p.rep * q.rep) < 1e-10)
      throw std::invalid_argument("M4Point: incident point-line pair");
  }
};

/// Chart coordinates: point (x, y), line y = a x + b. Lifts are fixed as
/// qhat = (x, y, 1), phat = (a, -1, b), so phat qhat = ax - y + b.
struct ChartPoint {
  double x, y, a, b;

  ChartPoint(double x_, double y_, double a_, double b_) : x(x_), y(y_), a(a_), b(b_) {
    if (std::abs(y - a * x - b) < 1e-10)
      throw std::invalid_argument("ChartPoint: incident pair");
  }

  Vec3 q_lift() const { return {x, y, 1}; }
  Covec3 p_lift() const { return {a, -1, b}; }
  M4Point point() const { return M4Point(ProjPoint(q_lift()), ProjLine(p_lift())); }
};

/// Tangent vector carried with explicit homogeneous representatives;
/// dq is defined modulo qhat and dp modulo phat.
struct M4Tangent {
  Vec3 qhat;
  Covec3 phat;
  Vec3 dq;
  Covec3 dp;
};

/// Dancing metric in homogeneous coordinates,
///   g = -2 (q x dq)(p x dp) / (pq)^2,
/// evaluated as a symmetric bilinear form. Gauge-independent: replacing
/// dq by dq + s qhat or dp by dp + s phat leaves the value unchanged.
inline double metric_eval(const M4Tangent& u1, const M4Tangent& u2) {
  if ((u1.qhat - u2.qhat).norm() > 1e-12 * (1 + u1.qhat.norm()) ||
      (u1.phat - u2.phat).norm() > 1e-12 * (1 + u1.phat.norm()))
    throw std::invalid_argument("metric_eval: mismatched base point");
  double pq = u1.phat * u1.qhat;
  Covec3 qa = cross_vv(u1.qhat, u1.dq);
  Covec3 qb = cross_vv(u2.qhat, u2.dq);
  Vec3 pa = cross_cc(u1.phat, u1.dp);
  Vec3 pb = cross_cc(u2.phat, u2.dp);
  return -(qa * pb + qb * pa) / (pq * pq);
}

inline double metric_norm2(const M4Tangent& u) { return metric_eval(u, u); }

/// The same metric through the algebraic identity
///   g = -2 [ (pq)(dp dq) - (p dq)(dp q) ] / (pq)^2,
/// used as an independent cross-check of metric_eval.
inline double metric_eval_bis(const M4Tangent& u1, const M4Tangent& u2) {
  double pq = u1.phat * u1.qhat;
  double term = (u1.dp * u2.dq + u2.dp * u1.dq) * pq -
                ((u1.phat * u2.dq) * (u1.dp * u1.qhat) + (u1.phat * u1.dq) * (u2.dp * u1.qhat));
  return -term / (pq * pq);
}

/// 4x4 matrix of the metric in chart coordinates ordered (x, y, a, b):
///   g = 2 ( da[(y-b)dx - x dy] + db[a dx - dy] ) / (y - ax - b)^2.
/// The constant 2 is what the homogeneous formula produces through the
/// chart lifts qhat = (x,y,1), phat = (a,-1,b).
inline std::array<std::array<double, 4>, 4> metric_chart(const ChartPoint& cp) {
  double d = cp.y - cp.a * cp.x - cp.b;
  if (std::abs(d) < 1e-10) throw std::invalid_argument("metric_chart: incident pair");
  double s = 1.0 / (d * d);
  std::array<std::array<double, 4>, 4> g{};
  // symmetric products: coefficient of du dv lands as g[u][v] = g[v][u] = c/2
  g[0][2] = g[2][0] = (cp.y - cp.b) * s;  // da dx
  g[1][2] = g[2][1] = -cp.x * s;          // da dy
  g[0][3] = g[3][0] = cp.a * s;           // db dx
  g[1][3] = g[3][1] = -s;                 // db dy
  return g;
}

/// Chart tangent -> homogeneous tangent through the fixed lifts.
inline M4Tangent chart_tangent(const ChartPoint& cp, double dx, double dy, double da, double db) {
  return {cp.q_lift(), cp.p_lift(), Vec3{dx, dy, 0}, Covec3{da, 0, db}};
}

// ---------------------------------------------------------------------------
// Dancing condition
// ---------------------------------------------------------------------------

/// Normalized incidence defect between the tangent line of the q-curve and
/// the turning point of the p-curve: |q* . p*| / (|q*||p*|); zero exactly at
/// null velocities.
inline double dancing_residual(const PlaneCurve& q_curve, const PlaneCurve& p_curve, double t) {
  CurveJets qa = q_curve.jets(t);
  CurveJets pa = p_curve.jets(t);
  Covec3 qstar = cross_vv(qa[0], qa[1]);
  // p-curve is stored componentwise; its representatives are covectors
  Covec3 p0{pa[0][0], pa[0][1], pa[0][2]};
  Covec3 p1{pa[1][0], pa[1][1], pa[1][2]};
  Vec3 pstar = cross_cc(p0, p1);
  double qn = qstar.norm(), pn = pstar.norm();
  if (qn < 1e-12 * (qa[0].norm() * qa[1].norm() + 1e-300) ||
      pn < 1e-12 * (p0.norm() * p1.norm() + 1e-300))
    throw std::domain_error("dancing_residual: degenerate at t");
  return std::abs(qstar * pstar) / (qn * pn);
}

// ---------------------------------------------------------------------------
// Cross-ratio formula for the metric
// ---------------------------------------------------------------------------

/// Cross-ratio of the quadruple (q, qbar, q_eps, qbar_eps) on the line
/// through q and q_eps, where qbar, qbar_eps are the intersections with the
/// lines p, p_eps. For a curve with velocity v this equals
/// (1/2) eps^2 g(v,v) + O(eps^3).
inline double cross_ratio_metric(const std::function<Vec3(double)>& q_of_t,
                                 const std::function<Covec3(double)>& p_of_t, double t,
                                 double eps) {
  Vec3 q0 = q_of_t(t), q1 = q_of_t(t + eps);
  Covec3 p0 = p_of_t(t), p1 = p_of_t(t + eps);
  Covec3 ell = cross_vv(q0, q1);
  if (ell.norm() < 1e-12 * (q0.norm() * q1.norm()))
    throw std::invalid_argument("cross_ratio_metric: eps too small or curve degenerate");
  Vec3 qbar0 = cross_cc(ell, p0);
  Vec3 qbar1 = cross_cc(ell, p1);
  ProjPoint a1(q0), a2(qbar0), a3(q1), a4(qbar1);
  Quadruple qd({a1, a2, a3, a4}, ProjLine(ell));
  return cross_ratio(qd);
}

/// Same, for a curve on the quadric (representatives normalized to pq = 1,
/// matching the homogeneous metric formula above).
inline double cross_ratio_metric(const M4Tangent& v, double eps) {
  double pq = v.phat * v.qhat;
  Vec3 qh = v.qhat;
  Covec3 ph = v.phat / pq;
  auto q_of = [qh, v](double s) { return qh + s * v.dq; };
  auto p_of = [ph, v, pq](double s) { return ph + (s / pq) * v.dp; };
  return cross_ratio_metric(q_of, p_of, 0.0, eps);
}

// ---------------------------------------------------------------------------
// Duality
// ---------------------------------------------------------------------------

/// Dual curve t -> q x q'; inflection points of the input become singular
/// points of the output ((q*)' = 0 there).
struct DualCurveResult {
  PlaneCurve curve;  // componentwise storage of the covector representatives
  std::function<bool(double)> singular_at;
};

inline DualCurveResult dual_curve(const PlaneCurve& c) {
  // fully inflectional curves have an identically-zero dual derivative
  PlaneCurve d = c.dual();
  auto jd = d.jets;
  auto singular = [jd](double t) {
    CurveJets a = jd(t);
    return a[1].norm() < 1e-9 * (1 + a[0].norm());
  };
  // reject line-like inputs: sample the derivative of the dual
  int zero_count = 0;
  for (int i = 0; i <= 8; ++i) {
    CurveJets a = jd(-0.8 + 0.2 * i);
    if (a[1].norm() < 1e-12 * (1 + a[0].norm())) ++zero_count;
  }
  if (zero_count == 9) throw std::domain_error("dual_curve: dual degenerates to a point");
  return {d, singular};
}

// ---------------------------------------------------------------------------
// Projective contact elements
// ---------------------------------------------------------------------------

/// psi : T_q RP^2 -> T_p RP^2*, psi(v) = scale * (qhat x v) at the pq = 1
/// lifts. Stored by the scale relative to that canonical map; its graph is a
/// null 2-plane for every scale, and the projectivization sends the line
/// through q with direction v to the intersection point of that line with p.
struct ContactElement {
  Vec3 qhat;    // lift with phat qhat = 1
  Covec3 phat;
  double scale;

  Covec3 apply(const Vec3& v) const { return scale * cross_vv(qhat, v); }

  M4Tangent graph_tangent(const Vec3& v) const { return {qhat, phat, v, apply(v)}; }
};

inline ContactElement contact_psi(const M4Point& pt, double scale) {
  if (scale == 0.0) throw std::invalid_argument("contact_psi: zero scale");
  double pq = pt.p.rep * pt.q.rep;
  return {pt.q.rep, pt.p.rep / pq, scale};
}

inline Covec3 psi_apply(const ContactElement& ce, const Vec3& v) { return ce.apply(v); }

/// The canonical isomorphism with the quadric: (q, p) with pq = 1 maps to the
/// contact element psi(v) = q x v over ([q], [p]).
inline ContactElement q5_to_contact(const Q5Point& pt) { return {pt.q, pt.p, 1.0}; }

/// The projectivized contact map as incidence geometry: a line ell through q
/// maps to the point ell ^ p. In homogeneous terms psi(v) IS the line through
/// q with direction v, and the image point is its intersection with p.
inline ProjPoint contact_image_point(const ContactElement& ce, const Vec3& v) {
  Covec3 ell = cross_vv(ce.qhat, v);
  return ProjPoint(cross_cc(ell, ce.phat));
}

}  // namespace dancing

#endif  // DANCING_DANCING_METRIC_HPP
