/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_CARTAN_ENGEL_HPP
#define DANCING_CARTAN_ENGEL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dancing/linalg.hpp"
#include "dancing/numeric.hpp"
#include "dancing/octonions.hpp"
#include "dancing/ode.hpp"

// The quadric Q^5 = {pq = 1} with the rank-2 distribution
// D = ker(dp - q x dq), integral-curve integration with first-integral
// projection, growth-vector certification by exact Lie brackets of the
// polynomial frame fields, and the explicit 14-dimensional symmetry algebra.

namespace dancing {

struct Q5Point {
  Vec3 q;
  Covec3 p;

  Q5Point(const Vec3& q_, const Covec3& p_) : q(q_), p(p_) {
    if (std::abs(p * q - 1.0) > 1e-10)
      throw std::invalid_argument("Q5Point: pq = 1 violated");
  }
};

struct Q5Tangent {
  Vec3 dq;
  Covec3 dp;

  Q5Tangent() = default;
  /// checked against the base point: d(pq) = dp q + p dq must vanish
  Q5Tangent(const Q5Point& base, const Vec3& dq_, const Covec3& dp_) : dq(dq_), dp(dp_) {
    double scale = 1.0 + dq.norm() + dp.norm();
    if (std::abs(dp * base.q + base.p * dq) > 1e-10 * scale)
      throw std::invalid_argument("Q5Tangent: not tangent to the quadric");
  }

  double norm() const { return std::sqrt(dq.norm() * dq.norm() + dp.norm() * dp.norm()); }
};

/// Tangent pair (dq, dp) without the tangency check (internal helper).
struct FlowVec {
  Vec3 dq;
  Covec3 dp;

  FlowVec() = default;
  FlowVec(const Vec3& a, const Covec3& b) : dq(a), dp(b) {}
  FlowVec operator-(const FlowVec& o) const { return {dq - o.dq, dp - o.dp}; }
  FlowVec operator+(const FlowVec& o) const { return {dq + o.dq, dp + o.dp}; }
  friend FlowVec operator*(double s, const FlowVec& v) { return {s * v.dq, s * v.dp}; }
  double norm() const { return std::sqrt(dq.norm() * dq.norm() + dp.norm() * dp.norm()); }
};

/// omega = dp - q x dq evaluated on a tangent pair; vanishes exactly on D.
inline Covec3 annihilator_form(const Vec3& q, const FlowVec& v) {
  return v.dp - cross_vv(q, v.dq);
}

// ---------------------------------------------------------------------------
// Distribution frame
// ---------------------------------------------------------------------------

/// Two independent tangents of the form (v, q x v) with p v = 0, built as
/// v = p x w for the two covectors w in {e^1, e^2, e^3} giving the most
/// independent pair.
inline std::array<int, 2> dist_frame_indices(const Q5Point& pt) {
  Vec3 cand[3];
  for (int k = 0; k < 3; ++k) cand[k] = cross_cc(pt.p, basis_covec(k));
  double best = -1.0;
  std::array<int, 2> idx{0, 1};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      double indep = cross_vv(cand[i], cand[j]).norm();
      if (indep > best) {
        best = indep;
        idx = {i, j};
      }
    }
  if (best < 1e-14) throw std::logic_error("dist_frame: frame degenerate");
  return idx;
}

/// The frame field with a frozen covector choice (smooth polynomial field).
inline FlowVec frame_field(int w_index, const Vec3& q, const Covec3& p) {
  Vec3 v = cross_cc(p, basis_covec(w_index));
  return {v, cross_vv(q, v)};
}

inline std::pair<Q5Tangent, Q5Tangent> dist_frame(const Q5Point& pt) {
  auto idx = dist_frame_indices(pt);
  FlowVec f1 = frame_field(idx[0], pt.q, pt.p);
  FlowVec f2 = frame_field(idx[1], pt.q, pt.p);
  return {Q5Tangent(pt, f1.dq, f1.dp), Q5Tangent(pt, f2.dq, f2.dp)};
}

// ---------------------------------------------------------------------------
// Polynomial vector fields and exact brackets
//
// All fields used here are polynomial of degree <= 3 in (q, p); their
// directional derivatives are hand-coded closed forms (cross-validated
// against central finite differences in the tests), so iterated Lie brackets
// are exact up to roundoff.
// ---------------------------------------------------------------------------

struct PolyField {
  std::function<FlowVec(const Vec3&, const Covec3&)> value;
  // directional derivative: D field(q,p) . (dq, dp)
  std::function<FlowVec(const Vec3&, const Covec3&, const FlowVec&)> deriv;
};

inline PolyField make_frame_poly(int w_index) {
  Covec3 w = basis_covec(w_index);
  PolyField f;
  f.value = [w](const Vec3& q, const Covec3& p) -> FlowVec {
    Vec3 v = cross_cc(p, w);
    return {v, cross_vv(q, v)};
  };
  f.deriv = [w](const Vec3& q, const Covec3& p, const FlowVec& d) -> FlowVec {
    Vec3 v = cross_cc(p, w);
    Vec3 dv = cross_cc(d.dp, w);
    return {dv, cross_vv(d.dq, v) + cross_vv(q, dv)};
  };
  return f;
}

inline FlowVec lie_bracket(const PolyField& f, const PolyField& g, const Vec3& q, const Covec3& p) {
  return g.deriv(q, p, f.value(q, p)) - f.deriv(q, p, g.value(q, p));
}

/// Bracket as a field (value + derivative by the product rule); derivatives of
/// the factors' derivatives are taken with the same closed forms, which is
/// exact because everything is polynomial.
inline PolyField lie_bracket_field(const PolyField& f, const PolyField& g) {
  PolyField h;
  h.value = [f, g](const Vec3& q, const Covec3& p) { return lie_bracket(f, g, q, p); };
  h.deriv = [f, g](const Vec3& q, const Covec3& p, const FlowVec& d) -> FlowVec {
    // D[Dg . f - Df . g] . d  =  (D^2 g)(f, d) + Dg(Df d) - (D^2 f)(g, d) - Df(Dg d)
    // Second derivatives are obtained by differencing the closed-form first
    // derivatives, which are themselves polynomial; we evaluate them exactly
    // via the bilinearity of every term:
    //   D^2 F (u, d) = lim (DF(x + t d)(u) - DF(x)(u)) / t   -- linear in x, so exact slope.
    const double t = 1.0;  // exact for fields whose DF is affine in x (degree <= 2 derivative)
    auto d2 = [t, d](const PolyField& F, const Vec3& q_, const Covec3& p_, const FlowVec& u) {
      FlowVec a = F.deriv(q_ + t * d.dq, p_ + t * d.dp, u);
      FlowVec b = F.deriv(q_, p_, u);
      return (1.0 / t) * (a - b);
    };
    FlowVec fv = f.value(q, p), gv = g.value(q, p);
    FlowVec term1 = d2(g, q, p, fv) + g.deriv(q, p, f.deriv(q, p, d));
    FlowVec term2 = d2(f, q, p, gv) + f.deriv(q, p, g.deriv(q, p, d));
    return term1 - term2;
  };
  return h;
}

// ---------------------------------------------------------------------------
// Growth vector
// ---------------------------------------------------------------------------

struct GrowthVector {
  int r1, r2, r3;
  bool operator==(const GrowthVector& o) const { return r1 == o.r1 && r2 == o.r2 && r3 == o.r3; }
};

inline GrowthVector growth_vector(const Q5Point& pt) {
  auto idx = dist_frame_indices(pt);
  PolyField f1 = make_frame_poly(idx[0]);
  PolyField f2 = make_frame_poly(idx[1]);
  PolyField f12 = lie_bracket_field(f1, f2);

  auto to_col = [](const FlowVec& v) {
    Eigen::Matrix<double, 6, 1> c;
    for (int i = 0; i < 3; ++i) {
      c(i) = v.dq[i];
      c(3 + i) = v.dp[i];
    }
    return c;
  };

  std::vector<Eigen::Matrix<double, 6, 1>> cols;
  cols.push_back(to_col(f1.value(pt.q, pt.p)));
  cols.push_back(to_col(f2.value(pt.q, pt.p)));
  auto rank_of = [&]() {
    Eigen::MatrixXd m(6, static_cast<int>(cols.size()));
    for (int j = 0; j < m.cols(); ++j) m.col(j) = cols[static_cast<std::size_t>(j)];
    return numeric_rank(m);
  };
  int r1 = rank_of();
  cols.push_back(to_col(f12.value(pt.q, pt.p)));
  int r2 = rank_of();
  cols.push_back(to_col(lie_bracket(f1, f12, pt.q, pt.p)));
  cols.push_back(to_col(lie_bracket(f2, f12, pt.q, pt.p)));
  int r3 = rank_of();
  return {r1, r2, r3};
}

// ---------------------------------------------------------------------------
// Symmetry fields (the 14-dimensional algebra)
// ---------------------------------------------------------------------------

/// The quadratic field with parameters (A, b, c):
///   dq = 2b + Aq + p x c - (pb + cq) q
///   dp = 2c - pA + b x q - (pb + cq) p
/// Tangent to the quadric by an algebraic identity. The b x q term is the
/// L_b block of the derivation matrix; it equals the projectivized linear
/// field of the 7x7 derivation restricted to the affine chart x = 1.
inline FlowVec symmetry_field_raw(const G2Param& g, const Vec3& q, const Covec3& p) {
  double mu = p * g.b + g.c * q;
  Vec3 dq = 2.0 * g.b + g.A * q + cross_cc(p, g.c) - mu * q;
  Covec3 dp = 2.0 * g.c - p * g.A + cross_vv(g.b, q) - mu * p;
  return {dq, dp};
}

inline FlowVec symmetry_field_deriv(const G2Param& g, const Vec3& q, const Covec3& p,
                                    const FlowVec& d) {
  double mu = p * g.b + g.c * q;
  double dmu = d.dp * g.b + g.c * d.dq;
  Vec3 dq = g.A * d.dq + cross_cc(d.dp, g.c) - dmu * q - mu * d.dq;
  Covec3 dp = -(d.dp * g.A) + cross_vv(g.b, d.dq) - dmu * p - mu * d.dp;
  return {dq, dp};
}

inline PolyField make_symmetry_poly(const G2Param& g) {
  PolyField f;
  f.value = [g](const Vec3& q, const Covec3& p) { return symmetry_field_raw(g, q, p); };
  f.deriv = [g](const Vec3& q, const Covec3& p, const FlowVec& d) {
    return symmetry_field_deriv(g, q, p, d);
  };
  return f;
}

inline Q5Tangent symmetry_field(const G2Param& g, const Q5Point& pt) {
  FlowVec v = symmetry_field_raw(g, pt.q, pt.p);
  return Q5Tangent(pt, v.dq, v.dp);
}

/// Max over sample points of |omega([X_g, F_i])| for the two frame fields;
/// ~0 certifies that X_g is an infinitesimal symmetry of the distribution.
inline double symmetry_residual_field(const PolyField& x, Rng& rng, int n_points = 50) {
  double worst = 0;
  for (int s = 0; s < n_points; ++s) {
    Vec3 q = rng.vec3();
    Covec3 p = rng.covec3();
    double pq = p * q;
    if (std::abs(pq) < 0.2) {
      --s;
      continue;
    }
    p = p / pq;  // now pq = 1
    Q5Point pt(q, p);
    auto idx = dist_frame_indices(pt);
    for (int k = 0; k < 2; ++k) {
      PolyField fr = make_frame_poly(idx[k]);
      FlowVec br = lie_bracket(x, fr, q, p);
      double frnorm = fr.value(q, p).norm() + x.value(q, p).norm();
      double res = annihilator_form(q, br).norm() / (1.0 + frnorm);
      worst = std::max(worst, res);
    }
  }
  return worst;
}

inline double symmetry_residual(const G2Param& g, Rng& rng, int n_points = 50) {
  return symmetry_residual_field(make_symmetry_poly(g), rng, n_points);
}

/// Jet (value + Jacobian) of a field at several points, flattened; fields on a
/// 5-manifold cannot be pointwise independent in dimension 14, so dimension
/// counting happens in jet space.
inline Eigen::VectorXd field_jet(const PolyField& f, const std::vector<Q5Point>& pts) {
  Eigen::VectorXd out(static_cast<int>(pts.size()) * 42);
  int at = 0;
  for (const auto& pt : pts) {
    FlowVec v = f.value(pt.q, pt.p);
    for (int i = 0; i < 3; ++i) out(at++) = v.dq[i];
    for (int i = 0; i < 3; ++i) out(at++) = v.dp[i];
    for (int k = 0; k < 6; ++k) {
      FlowVec dir;
      if (k < 3)
        dir.dq[k] = 1.0;
      else
        dir.dp[k - 3] = 1.0;
      FlowVec dv = f.deriv(pt.q, pt.p, dir);
      for (int i = 0; i < 3; ++i) out(at++) = dv.dq[i];
      for (int i = 0; i < 3; ++i) out(at++) = dv.dp[i];
    }
  }
  return out;
}

/// Rank of the joint jet span of the given parameter set together with all
/// pairwise brackets, evaluated at 3 generic points.
inline int algebra_dimension(const std::vector<G2Param>& params) {
  Rng rng(0xD15EA5E);
  std::vector<Q5Point> pts;
  for (int i = 0; i < 3; ++i) {
    Vec3 q = rng.vec3();
    Covec3 p = rng.covec3();
    double pq = p * q;
    if (std::abs(pq) < 0.2) {
      --i;
      continue;
    }
    pts.emplace_back(q, p / pq);
  }
  std::vector<PolyField> fields;
  for (const auto& g : params) fields.push_back(make_symmetry_poly(g));
  std::vector<Eigen::VectorXd> jets;
  for (const auto& f : fields) jets.push_back(field_jet(f, pts));
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i + 1; j < fields.size(); ++j)
      jets.push_back(field_jet(lie_bracket_field(fields[i], fields[j]), pts));
  Eigen::MatrixXd m(jets[0].size(), static_cast<int>(jets.size()));
  for (int j = 0; j < m.cols(); ++j) m.col(j) = jets[static_cast<std::size_t>(j)];
  return numeric_rank(m);
}

inline int algebra_dimension() { return algebra_dimension(g2_basis()); }

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

struct Q5Sample {
  double t;
  Vec3 q;
  Covec3 p;
  Vec3 u;  // control value at t
};

struct Q5Trajectory {
  std::vector<Q5Sample> samples;
  double max_constraint_drift = 0;  // max |pq - 1| over samples
  double tol = 0;

  double t0() const { return samples.front().t; }
  double t1() const { return samples.back().t; }

  /// 6th-order finite-difference defect |p' - q x q'| at interior samples,
  /// normalized by |q'| + |p'|. Requires a uniform sample grid.
  double midpoint_residual() const {
    std::size_t n = samples.size();
    if (n < 9) return 0.0;
    double h = samples[1].t - samples[0].t;
    double worst = 0;
    std::vector<double> comp(n);
    std::vector<Vec3> dq(n);
    std::vector<Covec3> dp(n);
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < n; ++i) comp[i] = samples[i].q[c];
      for (std::size_t i = 3; i + 3 < n; ++i) dq[i][c] = stencil7(comp, i, h).d1;
      for (std::size_t i = 0; i < n; ++i) comp[i] = samples[i].p[c];
      for (std::size_t i = 3; i + 3 < n; ++i) dp[i][c] = stencil7(comp, i, h).d1;
    }
    for (std::size_t i = 3; i + 3 < n; ++i) {
      Covec3 defect = dp[i] - cross_vv(samples[i].q, dq[i]);
      double scale = dq[i].norm() + dp[i].norm() + 1e-30;
      worst = std::max(worst, defect.norm() / scale);
    }
    return worst;
  }
};

using Control = std::function<Vec3(double)>;

/// Integrate q' = u - (pu/pq) q, p' = q x q' from pt0 with the given control,
/// renormalizing p onto the quadric after each accepted step. Samples are
/// returned on a uniform grid of n_samples points.
inline Q5Trajectory integrate(const Q5Point& pt0, const Control& control, double t_begin,
                              double t_end, double tol = 1e-10, int n_samples = 2001) {
  OdeRhs rhs = [&control](double t, const std::vector<double>& y, std::vector<double>& dy) {
    Vec3 q{y[0], y[1], y[2]};
    Covec3 p{y[3], y[4], y[5]};
    Vec3 u = control(t);
    double pq = p * q;
    Vec3 qd = u - ((p * u) / pq) * q;
    Covec3 pd = cross_vv(q, qd);
    dy = {qd[0], qd[1], qd[2], pd[0], pd[1], pd[2]};
  };
  OdeOptions opt;
  opt.rtol = std::min(1e-12, tol * 1e-2);
  opt.atol = opt.rtol;
  opt.h_init = 1e-4;
  opt.poststep = [](double, std::vector<double>& y) {
    Vec3 q{y[0], y[1], y[2]};
    Covec3 p{y[3], y[4], y[5]};
    double pq = p * q;
    for (int i = 0; i < 3; ++i) y[3 + i] /= pq;  // exact projection onto pq = 1
  };

  std::vector<double> grid(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i)
    grid[static_cast<std::size_t>(i)] =
        t_begin + (t_end - t_begin) * static_cast<double>(i) / (n_samples - 1);

  Q5Trajectory traj;
  traj.tol = tol;
  std::vector<double> y0 = {pt0.q[0], pt0.q[1], pt0.q[2], pt0.p[0], pt0.p[1], pt0.p[2]};
  try {
    ode_integrate(rhs, t_begin, t_end, y0, opt, grid,
                  [&](double t, const std::vector<double>& y) {
                    Q5Sample s;
                    s.t = t;
                    s.q = {y[0], y[1], y[2]};
                    s.p = {y[3], y[4], y[5]};
                    s.u = control(t);
                    traj.samples.push_back(s);
                    traj.max_constraint_drift =
                        std::max(traj.max_constraint_drift, std::abs(s.p * s.q - 1.0));
                  });
  } catch (const std::runtime_error&) {
    throw std::runtime_error("integrate: stiff/singular control");
  }
  return traj;
}

/// CSV export with header t,q1,q2,q3,p1,p2,p3.
inline std::string trajectory_csv(const Q5Trajectory& traj) {
  std::string out = "t,q1,q2,q3,p1,p2,p3\n";
  char buf[256];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.q[0],
                  s.q[1], s.q[2], s.p[0], s.p[1], s.p[2]);
    out += buf;
  }
  return out;
}

}  // namespace dancing

#endif  // DANCING_CARTAN_ENGEL_HPP
