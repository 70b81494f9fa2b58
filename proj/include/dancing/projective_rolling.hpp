/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_PROJECTIVE_ROLLING_HPP
#define DANCING_PROJECTIVE_ROLLING_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dancing/dancing_metric.hpp"
#include "dancing/linalg.hpp"
#include "dancing/projective_curves.hpp"

// Osculating conics, their developments, parallel transport of lines along a
// locally convex curve, normal acceleration, and the no-slip / no-twist
// residuals of contact-element curves.

namespace dancing {

// ---------------------------------------------------------------------------
// Osculating conic
// ---------------------------------------------------------------------------

/// A point conic: symmetric 3x3 matrix up to scale. Nondegenerate conics
/// have rank 3; incidence is the vanishing of the associated quadratic form.
struct Conic {
  Mat3 m;  // symmetric
};

namespace rolling_detail {

inline double conic_value(const Mat3& c, const Vec3& v) {
  Vec3 cv = c * v;
  return v[0] * cv[0] + v[1] * cv[1] + v[2] * cv[2];
}

}  // namespace rolling_detail

/// The unique conic with 4th-order contact at parameter t of an LF curve:
/// in the frame (A, A', A'') it is the square-completion y^2 = 2 x z. The
/// returned matrix is expressed in standard coordinates.
inline Conic osculating_conic(const LFCurve& lf, double t) {
  std::array<Vec3, 5> a = lf.jets(t);
  Mat3 frame = Mat3::from_cols(a[0], a[1], a[2]);
  Mat3 finv = frame.inverse();
  // y^2 - 2 x z in frame coordinates
  Mat3 q;
  q(1, 1) = 1;
  q(0, 2) = q(2, 0) = -1;
  Mat3 c = finv.transpose() * (q * finv);
  // symmetrize against roundoff
  Mat3 sym = 0.5 * (c + c.transpose());
  return {sym};
}

/// normalized incidence of a point with a conic
inline double conic_incidence(const Conic& c, const Vec3& v) {
  return std::abs(rolling_detail::conic_value(c.m, v)) / (c.m.frob() * v.norm() * v.norm());
}

// ---------------------------------------------------------------------------
// Developments
// ---------------------------------------------------------------------------

/// A development of the curve: a curve traced on the osculating conics whose
/// tangent passes through the contact point. Either the distinguished branch
/// x(t) = [A''(t)] or a family member P_c(t) = A + (c-t)A' + (c-t)^2/2 A''.
struct Development {
  const LFCurve* base;
  bool second_derivative_branch;
  double c = 0;  // only for the P_c branch

  Vec3 point(double t) const {
    std::array<Vec3, 5> a = base->jets(t);
    if (second_derivative_branch) return a[2];
    double u = c - t;
    return a[0] + u * a[1] + 0.5 * u * u * a[2];
  }

  /// velocity of the homogeneous representative
  Vec3 velocity(double t) const {
    std::array<Vec3, 5> a = base->jets(t);
    double r = base->r(t);
    if (second_derivative_branch) return -r * a[0];  // (A'')' = -r A
    double u = c - t;
    // P_c' = (c-t)^2/2 * A''' = -(c-t)^2/2 r A
    return (-0.5 * u * u * r) * a[0];
  }

  /// at the cusp of a P_c branch, the projective velocity vanishes
  bool at_cusp(double t, double tol = 1e-8) const {
    if (second_derivative_branch) return false;
    return std::abs(c - t) < tol;
  }
};

inline Development development(const LFCurve& lf, bool second_derivative_branch, double c = 0) {
  return {&lf, second_derivative_branch, c};
}

/// horizontality defect: the tangent line of the development passes through
/// the contact point (zero by construction; exposed as a certificate)
inline double development_horizontality(const Development& dev, double t) {
  Vec3 x = dev.point(t);
  Vec3 v = dev.velocity(t);
  std::array<Vec3, 5> a = dev.base->jets(t);
  if (v.norm() < 1e-14 * (1 + x.norm())) return 0;  // cusp: line degenerates to the point
  return std::abs(det3(x, v, a[0])) / (x.norm() * v.norm() * a[0].norm());
}

// ---------------------------------------------------------------------------
// Parallel transport of lines
// ---------------------------------------------------------------------------

/// Transport the line ell0 through q(t0) to the line at t1, via the
/// stereographic identification of the pencil at q with the osculating conic
/// and the closed-form developments.
inline ProjLine parallel_transport_line(const LFCurve& lf, const ProjLine& ell0, double t0,
                                        double t1) {
  std::array<Vec3, 5> a = lf.jets(t0);
  if (std::abs(ell0.rep * a[0]) > 1e-8 * (ell0.rep.norm() * a[0].norm()))
    throw std::invalid_argument("parallel_transport_line: line misses the curve point");
  // second intersection of ell0 with the osculating conic, in frame coords:
  // points x A + y A' + z A'' with y^2 = 2 x z
  Mat3 frame = Mat3::from_cols(a[0], a[1], a[2]);
  Covec3 lf_coords = ell0.rep * frame;  // line in frame coordinates
  // In frame coordinates the conic is (x, y, z) with y^2 = 2xz, covered by
  // (1, u, u^2/2) together with the point [A''] = (0, 0, 1). A line through
  // q = (1, 0, 0) has l0 = 0 and meets the conic where u (l1 + l2 u/2) = 0:
  // once at q (u = 0) and once at u = -2 l1/l2. Degenerations: l1 = 0 is the
  // tangent line at q (double contact); l2 = 0 sends the second intersection
  // to [A''].
  double l1 = lf_coords[1], l2 = lf_coords[2];
  std::array<Vec3, 5> b = lf.jets(t1);
  double scale = std::abs(l1) + std::abs(l2) + 1e-300;
  if (std::abs(l1) < 1e-12 * scale) {
    // tangent line: the transported family is the moving tangent
    return ProjLine(cross_vv(b[0], b[1]));
  }
  Development dev = std::abs(l2) < 1e-12 * scale ? development(lf, true)
                                                 : development(lf, false, t0 - 2.0 * l1 / l2);
  Vec3 x1 = dev.point(t1);
  if (cross_vv(x1, b[0]).norm() < 1e-10 * (x1.norm() * b[0].norm())) {
    // the development passes through the curve point (cusp): the line is
    // the tangent there
    return ProjLine(cross_vv(b[0], b[1]));
  }
  return ProjLine(cross_vv(b[0], x1));
}

// ---------------------------------------------------------------------------
// Normal acceleration
// ---------------------------------------------------------------------------

/// The normal acceleration of a regular parametrized curve at t: the class of
/// the second derivative of any lift modulo the span of the lift and its
/// first derivative. Returned as the invariant scalar factor against the
/// declared transversal (the third frame direction), plus the raw class
/// representative.
struct NormalAccel {
  Vec3 representative;  // q'' reduced modulo (q, q')
  double det_scalar;    // det(q, q', q'') -- zero exactly at inflections
};

inline NormalAccel normal_acceleration(const PlaneCurve& c, double t) {
  CurveJets a = c.jets(t);
  if (cross_vv(a[0], a[1]).norm() < 1e-12 * (a[0].norm() * a[1].norm() + 1e-300))
    throw std::invalid_argument("normal_acceleration: critical point of the parametrization");
  // Gram-Schmidt style reduction of q'' modulo span(q, q')
  Vec3 v = a[2];
  Covec3 n = cross_vv(a[0], a[1]);  // annihilator of the span
  double nn = n.norm();
  // representative: component of q'' along the annihilator direction
  Vec3 ndual{n[0], n[1], n[2]};
  double coef = (n * v) / (nn * nn);
  NormalAccel out;
  out.representative = coef * ndual;
  out.det_scalar = det3(a[0], a[1], a[2]);
  return out;
}

// ---------------------------------------------------------------------------
// No-slip and no-twist
// ---------------------------------------------------------------------------

/// No-slip residual of a contact-element curve at t: |psi(q') - p'| modulo
/// the gauge direction, normalized. psi_scale(t) gives the contact scale
/// against the canonical q x . map at the pq = 1 lifts.
inline double no_slip_residual(const SolutionJets& pair, const std::function<double(double)>& psi_scale,
                               double t) {
  std::array<Vec3, 4> q = pair.q_jets(t);
  std::array<Covec3, 4> p = pair.p_jets(t);
  double pq = p[0] * q[0];
  // canonical lifts: qh = q, ph = p / pq; the contact map psi(v) = s qh x v
  Covec3 ph = p[0] / pq;
  Covec3 php = p[1] / pq;  // gauge freedom absorbs d(pq)/dt terms
  Covec3 image = psi_scale(t) * cross_vv(q[0], q[1]);
  Covec3 defect = image - php;
  // reduce modulo the gauge direction ph
  Vec3 cr = cross_cc(defect, ph);
  return cr.norm() / (1 + php.norm()) / ph.norm();
}

/// The scale making no-slip hold (the induced contact element along a null
/// curve); least squares against the gauge direction.
inline double induced_psi_scale(const SolutionJets& pair, double t) {
  std::array<Vec3, 4> q = pair.q_jets(t);
  std::array<Covec3, 4> p = pair.p_jets(t);
  double pq = p[0] * q[0];
  Covec3 ph = p[0] / pq;
  Covec3 target = p[1] / pq;
  Covec3 base = cross_vv(q[0], q[1]);
  // solve min_s,mu |s base - target - mu ph|
  double b2 = 0, bp = 0, bt = 0, p2 = 0, pt = 0;
  for (int i = 0; i < 3; ++i) {
    b2 += base[i] * base[i];
    bp += base[i] * ph[i];
    bt += base[i] * target[i];
    p2 += ph[i] * ph[i];
    pt += ph[i] * target[i];
  }
  double det = b2 * p2 - bp * bp;
  return (bt * p2 - bp * pt) / det;
}

/// psi maps normal accelerations to normal accelerations along no-slip
/// curves: |psi(q'') - p''| modulo span(p-hat, p-hat'). Exact for quadric
/// solutions in their own lifts.
inline double psi_acceleration_residual(const SolutionJets& pair, double t) {
  std::array<Vec3, 4> q = pair.q_jets(t);
  std::array<Covec3, 4> p = pair.p_jets(t);
  double pq = p[0] * q[0];
  double s = induced_psi_scale(pair, t);
  Covec3 image = s * cross_vv(q[0], q[2]);
  Covec3 target = p[2] / pq;
  // reduce modulo span(ph, php)
  Covec3 ph = p[0] / pq;
  Covec3 php = p[1] / pq;
  Vec3 plane_normal = cross_cc(ph, php);
  double nn = plane_normal.norm();
  double defect = ((image - target) * plane_normal) / (nn + 1e-300);
  return std::abs(defect) / (1 + target.norm());
}

/// Extract the canonical involute data of a null pair over the LF base of its
/// q-member: the turning-point curve expanded in the frame (A, A'), scaled so
/// that the representative satisfies a clean tautological equation
/// (unimodular normalization). Returns (x, y) with p* = x A + y A'.
struct InvoluteCoords {
  double x, y;
  double frame_defect;  // component along A'' (zero exactly for null pairs)
};

inline InvoluteCoords extract_involute(const LFCurve& base, const SolutionJets& pair, double tbar) {
  std::array<Vec3, 5> a = base.lf_jets(tbar);
  std::array<Covec3, 4> p = pair.p_jets(tbar);
  Vec3 pstar = cross_cc(p[0], p[1]);
  Vec3 p1s = cross_cc(p[0], p[2]);
  Vec3 p2s = cross_cc(p[1], p[2]) + cross_cc(p[0], p[3]);
  double Ib = det3(pstar, p1s, p2s);
  double mu = 1.0 / cbrt_real(Ib);
  Mat3 frame = Mat3::from_cols(a[0], a[1], a[2]);
  Vec3 coords = frame.inverse() * (mu * pstar);
  return {coords[0], coords[1], std::abs(coords[2]) / (1e-300 + mu * pstar.norm())};
}

/// Reparametrize a solution pair into the LF parameter of its q-member
/// (chain rule to order 3; the map derivatives come from centered
/// differences of the normalization's parameter map).
inline SolutionJets reparam_to_lf(const LFCurve& base, const SolutionJets& pair) {
  SolutionJets out;
  out.t0 = base.tbar_min;
  out.t1 = base.tbar_max;
  auto inv_jets = [&base](double tb) {
    double t = base.t_of_tbar(tb);
    double h = 1e-4;
    double f1 = (base.tbar_of_t(t + h) - base.tbar_of_t(t - h)) / (2 * h);
    double f2 = (base.tbar_of_t(t + h) - 2 * tb + base.tbar_of_t(t - h)) / (h * h);
    double f3 = (base.tbar_of_t(t + 2 * h) - 2 * base.tbar_of_t(t + h) + 2 * base.tbar_of_t(t - h) -
                 base.tbar_of_t(t - 2 * h)) /
                (2 * h * h * h);
    double t1 = 1.0 / f1;
    double t2 = -f2 / (f1 * f1 * f1);
    double t3 = (3 * f2 * f2 - f1 * f3) / (f1 * f1 * f1 * f1 * f1);
    return std::array<double, 4>{t, t1, t2, t3};
  };
  auto qj = pair.q_jets;
  auto pj = pair.p_jets;
  out.q_jets = [qj, inv_jets](double tb) {
    auto [t, t1, t2, t3] = inv_jets(tb);
    std::array<Vec3, 4> q = qj(t);
    std::array<Vec3, 4> o;
    o[0] = q[0];
    o[1] = t1 * q[1];
    o[2] = t2 * q[1] + t1 * t1 * q[2];
    o[3] = t3 * q[1] + 3 * t1 * t2 * q[2] + t1 * t1 * t1 * q[3];
    return o;
  };
  out.p_jets = [pj, inv_jets](double tb) {
    auto [t, t1, t2, t3] = inv_jets(tb);
    std::array<Covec3, 4> p = pj(t);
    std::array<Covec3, 4> o;
    o[0] = p[0];
    o[1] = t1 * p[1];
    o[2] = t2 * p[1] + t1 * t1 * p[2];
    o[3] = t3 * p[1] + 3 * t1 * t2 * p[2] + t1 * t1 * t1 * p[3];
    return o;
  };
  return out;
}

/// No-twist residual at tbar: transport the parallel line family
/// ell(t) = line(A, A'') with the contact map and compare with the parallel
/// point family [B'(t)] along the partner; returns the projective distance.
inline double no_twist_residual(const LFCurve& base, const SolutionJets& pair, double tbar,
                                double h = 1e-4) {
  std::array<Vec3, 5> a = base.lf_jets(tbar);
  std::array<Covec3, 4> p = pair.p_jets(tbar);
  // psi(ell) = ell ^ p: intersection of the parallel line with the partner line
  Covec3 ell = cross_vv(a[0], a[2]);
  Vec3 xstar = cross_cc(ell, p[0]);
  // canonical involute B and its derivative: B = x A + y A',
  // B' = (x' ) A + (x + y') A' + y A''  evaluated with centered differences
  // of the normalized coordinates
  InvoluteCoords c0 = extract_involute(base, pair, tbar);
  InvoluteCoords cp = extract_involute(base, pair, tbar + h);
  InvoluteCoords cm = extract_involute(base, pair, tbar - h);
  double xp = (cp.x - cm.x) / (2 * h);
  double yp = (cp.y - cm.y) / (2 * h);
  Vec3 bprime = xp * a[0] + (c0.x + yp) * a[1] + c0.y * a[2];
  ProjPoint lhs(xstar);
  ProjPoint rhs(bprime);
  return proj_dist(lhs, rhs);
}

}  // namespace dancing

#endif  // DANCING_PROJECTIVE_ROLLING_HPP
