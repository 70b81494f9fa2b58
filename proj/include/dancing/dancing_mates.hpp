/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_DANCING_MATES_HPP
#define DANCING_DANCING_MATES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dancing/curvature_lab.hpp"
#include "dancing/dancing_metric.hpp"
#include "dancing/linalg.hpp"
#include "dancing/ode.hpp"
#include "dancing/projective_curves.hpp"

// The involute and mate ordinary differential equations, the circle case
// y''' y^2 = 1, pair reconstruction B = -y' A + y A', and the constant
// projective curvature orbit families.

namespace dancing {

// ---------------------------------------------------------------------------
// Involute ODE: y'''' + 2 y''' (y' - C)/y + 3 r y' + r' y = 0
// ---------------------------------------------------------------------------

struct ScalarSolution {
  std::vector<double> ts;                // uniform grid
  std::vector<std::array<double, 6>> y;  // value and five derivatives at nodes
  double h = 0;

  /// Taylor evaluation from the nearest node, returned as an internally
  /// consistent jet family (each entry is the derivative of the previous one
  /// as a function of t, which downstream jet algebra relies on)
  std::array<double, 5> at(double t) const {
    double pos = (t - ts.front()) / h;
    auto i = static_cast<std::size_t>(clamp(std::round(pos), 0.0, static_cast<double>(ts.size()) - 1.0));
    double d = t - ts[i];
    const auto& v = y[i];
    double d2 = d * d / 2, d3 = d * d * d / 6, d4 = d * d * d * d / 24,
           d5 = d * d * d * d * d / 120;
    return {v[0] + d * v[1] + d2 * v[2] + d3 * v[3] + d4 * v[4] + d5 * v[5],
            v[1] + d * v[2] + d2 * v[3] + d3 * v[4] + d4 * v[5],
            v[2] + d * v[3] + d2 * v[4] + d3 * v[5], v[3] + d * v[4] + d2 * v[5],
            v[4] + d * v[5]};
  }
  double t0() const { return ts.front(); }
  double t1() const { return ts.back(); }
};

/// Integrate the 4th-order involute equation with constant C from init
/// (y, y', y'', y''') at span.first, stopping with an error before y = 0.
inline ScalarSolution involute_solve(const std::function<double(double)>& r,
                                     const std::function<double(double)>& rprime, double C,
                                     const std::array<double, 4>& init,
                                     std::pair<double, double> span, int n_samples = 2001) {
  if (init[0] == 0.0) throw std::invalid_argument("involute_solve: y(t0) = 0");
  OdeRhs rhs = [&](double t, const std::vector<double>& s, std::vector<double>& ds) {
    double yv = s[0];
    if (std::abs(yv) < 1e-9) throw std::runtime_error("singular");
    double y4 = -2.0 * s[3] * (s[1] - C) / yv - 3.0 * r(t) * s[1] - rprime(t) * s[0];
    ds = {s[1], s[2], s[3], y4};
  };
  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-12;
  std::vector<double> grid(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i)
    grid[static_cast<std::size_t>(i)] =
        span.first + (span.second - span.first) * i / (n_samples - 1);
  ScalarSolution sol;
  sol.h = grid[1] - grid[0];
  std::vector<double> y0(init.begin(), init.end());
  double sign0 = init[0] > 0 ? 1.0 : -1.0;
  opt.poststep = [sign0](double, std::vector<double>& s) {
    if (s[0] * sign0 < 1e-7) throw std::runtime_error("singular");
  };
  try {
    ode_integrate(rhs, span.first, span.second, y0, opt, grid,
                  [&](double t, const std::vector<double>& s) {
                    double rv = r(t), rp = rprime(t);
                    double hr = 1e-4;
                    double rpp = (rprime(t + hr) - rprime(t - hr)) / (2 * hr);
                    double y4 = -2.0 * s[3] * (s[1] - C) / s[0] - 3.0 * rv * s[1] - rp * s[0];
                    // derivative of the right-hand side along the solution
                    double y5 = -2.0 * (y4 * (s[1] - C) + s[3] * s[2]) / s[0] +
                                2.0 * s[3] * (s[1] - C) * s[1] / (s[0] * s[0]) - 3.0 * rp * s[1] -
                                3.0 * rv * s[2] - rpp * s[0] - rp * s[1];
                    sol.ts.push_back(t);
                    sol.y.push_back({s[0], s[1], s[2], s[3], y4, y5});
                  });
  } catch (const std::runtime_error&) {
    throw std::domain_error("involute_solve: singular, y vanishes in the window");
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Mate solutions over an LF base curve
// ---------------------------------------------------------------------------

/// A dancing-mate solution: scalar y over the LF base A with the involute
/// constant C (C = 0 for true mates) and the reconstruction B = (C-y')A + yA'.
struct MateSolution {
  LFCurve base;
  ScalarSolution y;
  double C = 0;
  double ode_residual = 0;  // 4th-order equation re-substituted

  /// B and derivatives to order 3 at t (uses the LF identity A''' = -rA)
  std::array<Vec3, 4> b_jets(double t) const {
    std::array<Vec3, 5> a = base.lf_jets(t);
    std::array<double, 5> ys = y.at(t);
    double r = base.r(t);
    // derivative of r along the grid (needed for B''')
    double hr = 1e-4;
    double rp = (base.r(t + hr) - base.r(t - hr)) / (2 * hr);
    double x0 = C - ys[1], x1 = -ys[2], x2 = -ys[3], x3 = -ys[4];
    // B = x A + y A'
    std::array<Vec3, 4> b;
    b[0] = x0 * a[0] + ys[0] * a[1];
    b[1] = (x1)*a[0] + (x0 + ys[1]) * a[1] + ys[0] * a[2];
    b[2] = (x2 - r * ys[0]) * a[0] + (2 * x1 + ys[2]) * a[1] + (x0 + 2 * ys[1]) * a[2];
    b[3] = (x3 - rp * ys[0] - r * (x0 + 3 * ys[1])) * a[0] + (3 * x2 - r * ys[0] + ys[3]) * a[1] +
           3.0 * (x1 + ys[2]) * a[2];
    return b;
  }

  /// the pair: q = [A], p = [B x B'] with jets to order 3
  SolutionJets pair_jets() const {
    SolutionJets out;
    out.t0 = y.t0();
    out.t1 = y.t1();
    const MateSolution* self = this;
    out.q_jets = [self](double t) {
      std::array<Vec3, 5> a = self->base.lf_jets(t);
      return std::array<Vec3, 4>{a[0], a[1], a[2], a[3]};
    };
    out.p_jets = [self](double t) {
      std::array<Vec3, 4> b = self->b_jets(t);
      // one more derivative of B for p''': B'''' via the forward difference of b_jets
      double hb = 1e-5;
      std::array<Vec3, 4> bp = self->b_jets(t + hb);
      std::array<Vec3, 4> bm = self->b_jets(t - hb);
      Vec3 b4 = (1.0 / (2 * hb)) * (bp[3] - bm[3]);
      Covec3 p0 = cross_vv(b[0], b[1]);
      Covec3 p1 = cross_vv(b[0], b[2]);
      Covec3 p2 = cross_vv(b[1], b[2]) + cross_vv(b[0], b[3]);
      Covec3 p3 = 2.0 * cross_vv(b[1], b[3]) + cross_vv(b[0], b4);
      return std::array<Covec3, 4>{p0, p1, p2, p3};
    };
    return out;
  }
};

/// Dancing mates of the conic: y''' = 1/y^2 in the Laguerre-Forsyth
/// parameter of A = (1 + t^2, 2t, 1 - t^2) (r = 0). The first integral
/// y''' y^2 is constant along solutions and is normalized to 1 by a
/// y-rescaling, which does not move the projective curve [B].
inline MateSolution circle_mates(const std::array<double, 3>& init, std::pair<double, double> span,
                                 int n_samples = 2001) {
  OdeRhs rhs = [](double, const std::vector<double>& s, std::vector<double>& ds) {
    if (std::abs(s[0]) < 1e-7) throw std::runtime_error("singular");
    ds = {s[1], s[2], 1.0 / (s[0] * s[0])};
  };
  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-12;
  std::vector<double> grid(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i)
    grid[static_cast<std::size_t>(i)] =
        span.first + (span.second - span.first) * i / (n_samples - 1);
  MateSolution ms;
  ms.base = LFCurve::from_lf_family(PlaneCurve::conic(), span.first - 0.2, span.second + 0.2);
  ms.C = 0;
  ms.y.h = grid[1] - grid[0];
  std::vector<double> y0 = {init[0], init[1], init[2]};
  // sign-watch on y: the solution branch ends before y = 0
  double sign0 = init[0] > 0 ? 1.0 : -1.0;
  opt.poststep = [sign0](double, std::vector<double>& s) {
    if (s[0] * sign0 < 1e-6) throw std::runtime_error("singular");
  };
  try {
    ode_integrate(rhs, span.first, span.second, y0, opt, grid,
                  [&](double t, const std::vector<double>& s) {
                    double y0v = s[0], y1v = s[1], y2v = s[2];
                    double y3v = 1.0 / (y0v * y0v);
                    double y4v = -2.0 * y1v / (y0v * y0v * y0v);
                    double y5v = (-2.0 * y2v * y0v + 6.0 * y1v * y1v) / (y0v * y0v * y0v * y0v);
                    ms.y.ts.push_back(t);
                    ms.y.y.push_back({y0v, y1v, y2v, y3v, y4v, y5v});
                  });
  } catch (const std::runtime_error&) {
    throw std::domain_error("circle_mates: singular, y vanishes in the window");
  }
  // residual of the mate equation y'''' + 2 y''' y' / y = 0 re-substituted
  // (r = 0); y'''' = -2 y'/y^3 from differentiating the closed form
  double worst = 0;
  for (std::size_t i = 0; i < ms.y.ts.size(); ++i) {
    const auto& s = ms.y.y[i];
    double y4 = -2.0 * s[1] / (s[0] * s[0] * s[0]);
    worst = std::max(worst, std::abs(y4 + 2 * s[3] * s[1] / s[0]) / (1 + std::abs(y4)));
  }
  ms.ode_residual = worst;
  return ms;
}

/// One chart is not enough to follow a mate all the way around the conic:
/// the projective parameter misses one point. The second chart tbar = 1/t
/// carries ybar(tbar) = f'(t) y(t) = -y/t^2, under which the normalized
/// first integral is preserved exactly (ybar''' ybar^2 = y''' y^2). This
/// continues a mate envelope across t = +/- infinity and returns projective
/// envelope samples [B] from both chart segments.
struct MateLoop {
  std::vector<Vec3> envelope;     // projective representatives of [B]
  std::vector<double> params;     // chart-1 parameter of each sample (tbar mapped back)
  std::size_t switch_index = 0;   // first sample taken in the second chart
};

inline MateLoop circle_mates_loop(const std::array<double, 3>& init, double t_start,
                                  int n_per_chart = 800) {
  MateLoop loop;
  // chart 1: integrate from t_start up to t = 1
  MateSolution seg1 = circle_mates(init, {t_start, 1.0}, n_per_chart);
  for (std::size_t i = 0; i < seg1.y.ts.size(); ++i) {
    loop.envelope.push_back(seg1.b_jets(seg1.y.ts[i])[0]);
    loop.params.push_back(seg1.y.ts[i]);
  }
  loop.switch_index = loop.envelope.size();
  // Switch data at t = tbar = 1: ybar(tbar) = -y(1/tbar)/tbar^2 gives
  //   ybar(1) = -y,  ybar'(1) = y' - 2y,  ybar''(1) = -y'' + 2y' - 2y.
  // The flipped scalar z(s) = -ybar(-s) solves the same normalized equation
  // z''' z^2 = 1 on an increasing window, so the standard solver continues
  // the branch.
  auto y1 = seg1.y.at(1.0);
  double ybar0 = -y1[0];
  double ybar1 = y1[1] - 2 * y1[0];
  double ybar2 = -y1[2] + 2 * y1[1] - 2 * y1[0];
  MateSolution seg2 = circle_mates({-ybar0, ybar1, -ybar2}, {-1.0, -0.05}, n_per_chart);
  // On the conic, t -> 1/t is the involution diag(1, 1, -1) of the plane:
  // tbar^2 A(1/tbar) = (1 + tbar^2, 2 tbar, -(1 - tbar^2)). The chart-2
  // reconstruction is the standard one followed by that involution; the
  // solver parameter s = -tbar increases, so ascending samples continue the
  // first chart from t = 1 upward.
  for (std::size_t i = 0; i < seg2.y.ts.size(); ++i) {
    double s = seg2.y.ts[i];
    double tbar = -s;
    if (tbar < 0.05) continue;
    auto zs = seg2.y.y[i];
    double ybar = -zs[0];
    double ybarp = zs[1];
    Vec3 a0{1 + tbar * tbar, 2 * tbar, 1 - tbar * tbar};
    Vec3 a1{2 * tbar, 2, -2 * tbar};
    Vec3 b = -ybarp * a0 + ybar * a1;
    loop.envelope.push_back(Vec3{b[0], b[1], -b[2]});
    loop.params.push_back(1.0 / tbar);
  }
  return loop;
}

/// log-derivative first integral along circle-mate solutions, with the third
/// derivative recomputed by differencing the stored second derivative (an
/// independent route, not the stored closed form)
inline double first_integral_drift(const MateSolution& ms) {
  double worst = 0;
  for (std::size_t i = 1; i + 1 < ms.y.ts.size(); ++i) {
    double y3_fd = (ms.y.y[i + 1][2] - ms.y.y[i - 1][2]) / (2 * ms.y.h);
    double yv = ms.y.y[i][0];
    worst = std::max(worst, std::abs(y3_fd * yv * yv - 1.0));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Mate verification
// ---------------------------------------------------------------------------

struct MateReport {
  double dancing_residual = 0;       // nullity of the reconstructed pair
  double involute_constant = 0;      // |x + y'| = |C|
  double shared_a1_residual = 0;     // equality of the I=1 taut a1 of both members
  double parallel_sd = 0;            // phi along the adapted lift
  double taut_b_residual = 0;        // B''' x B = 0 (B solves a tautological ODE)
};

/// The projective-structure potential of a parametrized lift: the taut a1
/// after the I = 1 rescaling, a1 - a2' - a2^2/3 (a2' by central differences
/// of the jet data). Two curves share the projective parameter exactly when
/// their potentials agree.
inline double structure_potential(const std::function<std::array<Vec3, 4>(double)>& jets, double t,
                                  double h = 1e-3) {
  auto raw = [&](double tt) {
    std::array<Vec3, 4> j = jets(tt);
    double I = det3(j[0], j[1], j[2]);
    if (std::abs(I) < 1e-12) throw std::domain_error("structure_potential: inflection");
    double K = det3(j[0], j[2], j[3]);
    double Ip = det3(j[0], j[1], j[3]);
    return std::pair<double, double>(K / I, -Ip / I);  // (a1, a2)
  };
  auto [a1, a2] = raw(t);
  double a2p = (raw(t + h).second - raw(t - h).second) / (2 * h);
  return a1 - a2p - a2 * a2 / 3.0;
}

inline MateReport mate_verify(const MateSolution& ms, int n_samples = 40) {
  MateReport rep;
  SolutionJets pj = ms.pair_jets();
  double margin = 0.05 * (pj.t1 - pj.t0);
  // sample on the scalar grid and use a node-aligned step for the potential
  // differences, keeping all evaluations on one Taylor base
  auto snap = [&ms](double t) {
    return ms.y.ts.front() + std::round((t - ms.y.ts.front()) / ms.y.h) * ms.y.h;
  };
  double h_pot = 2.0 * ms.y.h;
  auto p_as_vec = [&pj](double t) {
    std::array<Covec3, 4> p = pj.p_jets(t);
    std::array<Vec3, 4> pv;
    for (int k = 0; k < 4; ++k)
      pv[static_cast<std::size_t>(k)] = Vec3{p[static_cast<std::size_t>(k)][0],
                                             p[static_cast<std::size_t>(k)][1],
                                             p[static_cast<std::size_t>(k)][2]};
    return pv;
  };
  for (int i = 0; i <= n_samples; ++i) {
    double t = snap(pj.t0 + margin + (pj.t1 - pj.t0 - 2 * margin) * i / n_samples);
    std::array<Vec3, 4> q = pj.q_jets(t);
    std::array<Covec3, 4> p = pj.p_jets(t);
    // (i) dancing condition
    Covec3 qstar = cross_vv(q[0], q[1]);
    Vec3 pstar = cross_cc(p[0], p[1]);
    rep.dancing_residual = std::max(
        rep.dancing_residual, std::abs(qstar * pstar) / (qstar.norm() * pstar.norm() + 1e-300));
    // (ii) x + y' = C
    rep.involute_constant = std::abs(ms.C);
    // (iii) both members induce the same projective structure potential
    double vq = structure_potential(pj.q_jets, t, h_pot);
    double vp = structure_potential(p_as_vec, t, h_pot);
    rep.shared_a1_residual = std::max(rep.shared_a1_residual, std::abs(vq - vp) / (1 + std::abs(vq)));
    // (v) B satisfies a tautological ODE without lower terms: B''' x B = 0
    std::array<Vec3, 4> b = ms.b_jets(t);
    double tb = cross_vv(b[3], b[0]).norm() / (1 + b[3].norm() * b[0].norm());
    rep.taut_b_residual = std::max(rep.taut_b_residual, tb);
  }
  // (iv) parallel SD plane through the curvature machinery
  SolutionJets window = pj;
  window.t0 = pj.t0 + margin;
  window.t1 = pj.t1 - margin;
  NullCurve nc(window);
  rep.parallel_sd = parallel_sd_residual(nc);
  return rep;
}

// ---------------------------------------------------------------------------
// Constant projective curvature pairs (orbit families)
// ---------------------------------------------------------------------------

/// borderline constant -3 * 32^{-1/3} dividing the spiral and power-curve
/// regimes of constant projective curvature
inline const double kKappaBorderline = -3.0 * std::pow(32.0, -1.0 / 3.0);

struct WCurveSpec {
  std::string family;  // "Y1", "Y2", "Y3"
  double param = 0;    // a > 0 or b > 0; unused for Y3
  Mat3 y;
  double a1 = 0, a0 = 0;  // characteristic polynomial l^3 + a1 l + a0
  double kappa = 0;
};

inline WCurveSpec wcurve_make(const std::string& family, double param = 0) {
  WCurveSpec spec;
  spec.family = family;
  spec.param = param;
  Mat3 y;
  if (family == "Y1") {
    if (!(param > 0)) throw std::invalid_argument("wcurve_make: Y1 needs a > 0");
    y(0, 0) = 1;
    y(0, 2) = 1;
    y(1, 1) = -1;
    y(1, 2) = param;
    y(2, 0) = param;
    y(2, 1) = -1;
  } else if (family == "Y2") {
    if (!(param > 0)) throw std::invalid_argument("wcurve_make: Y2 needs b > 0");
    y(0, 1) = 1;
    y(0, 2) = param;
    y(1, 0) = -1;
    y(2, 1) = -param;
  } else if (family == "Y3") {
    y(0, 1) = 1;
    y(1, 2) = 1;
    y(2, 0) = 1;
  } else {
    throw std::invalid_argument("wcurve_make: unknown family");
  }
  spec.y = y;
  // characteristic polynomial of a trace-free matrix: l^3 + a1 l + a0
  Mat3 y2 = y * y;
  spec.a1 = -0.5 * y2.trace();
  spec.a0 = -y.det();
  spec.kappa = 0.5 * spec.a1 / std::pow(cbrt_real(spec.a0), 2.0);
  // horizontality of the generator at (e3, e^3): third column (v1, v2, 0),
  // third row (v2, -v1, 0), sl2 block
  if (std::abs(y(2, 2)) > 1e-14 || std::abs(y(0, 0) + y(1, 1)) > 1e-14 ||
      std::abs(y(2, 0) - y(1, 2)) > 1e-14 || std::abs(y(2, 1) + y(0, 2)) > 1e-14)
    throw std::logic_error("wcurve_make: generator is not horizontal at the base point");
  return spec;
}

/// the orbit pair through (e3, e^3) as curves with full jets
struct WCurvePair {
  WCurveSpec spec;
  PlaneCurve q_curve;       // exp(tY) e3
  PlaneCurve p_curve;       // e^3 exp(-tY), componentwise
  SolutionJets jets(double t0, double t1) const { return wcurve_solution_jets(spec.y, t0, t1); }
};

inline WCurvePair wcurve_pair(const WCurveSpec& spec) {
  return {spec, PlaneCurve::orbit(spec.y, basis_vec(2)),
          PlaneCurve::orbit_dual(spec.y, basis_covec(2))};
}

}  // namespace dancing

#endif  // DANCING_DANCING_MATES_HPP
