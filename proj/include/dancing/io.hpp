/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_IO_HPP
#define DANCING_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "dancing/curvature_lab.hpp"
#include "dancing/dancing_mates.hpp"
#include "dancing/projective_curves.hpp"
#include "dancing/projective_rolling.hpp"

// File formats: sampled-curve JSON input, curvature report JSON, mate CSV,
// and a small SVG emitter for the figure subcommands.

namespace dancing {

// ---------------------------------------------------------------------------
// Sampled curves: {"t": [...], "A": [[x, y, z], ...]}
// ---------------------------------------------------------------------------

inline PlaneCurve load_sampled_curve(const nlohmann::json& j) {
  if (!j.contains("t") || !j.contains("A"))
    throw std::invalid_argument("sampled curve: need keys t and A");
  std::vector<double> ts = j.at("t").get<std::vector<double>>();
  std::vector<Vec3> as;
  for (const auto& row : j.at("A")) {
    if (row.size() != 3) throw std::invalid_argument("sampled curve: A rows need 3 reals");
    as.push_back(Vec3{row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
  }
  return PlaneCurve::sampled(ts, as);
}

inline PlaneCurve load_sampled_curve_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open curve file: " + path);
  nlohmann::json j;
  in >> j;
  return load_sampled_curve(j);
}

// ---------------------------------------------------------------------------
// Curvature report JSON
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const CurvatureReport& rep) {
  nlohmann::json j;
  j["scalar"] = rep.scalar;
  j["ricci0_norm"] = rep.ricci0_norm;
  j["weyl_minus_norm"] = rep.weyl_minus_norm;
  j["weyl_plus_norm"] = rep.weyl_plus_norm;
  j["weyl_plus_eigs"] = rep.weyl_plus_eigs;
  j["petrov"] = rep.petrov;
  j["principal_planes"] = {{rep.principal_plane_1[0], rep.principal_plane_1[1]},
                           {rep.principal_plane_2[0], rep.principal_plane_2[1]}};
  j["star_involution_defect"] = rep.star_involution_defect;
  j["self_adjoint_defect"] = rep.self_adjoint_defect;
  j["nabla_g_defect"] = rep.nabla_g_defect;
  return j;
}

// ---------------------------------------------------------------------------
// Mate CSV: t, y, y', y''
// ---------------------------------------------------------------------------

inline std::string mate_csv(const MateSolution& ms) {
  std::string out = "t,y,y1,y2\n";
  char buf[160];
  for (std::size_t i = 0; i < ms.y.ts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", ms.y.ts[i], ms.y.y[i][0],
                  ms.y.y[i][1], ms.y.y[i][2]);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

struct SvgCanvas {
  double xmin = -3, xmax = 3, ymin = -3, ymax = 3;
  int width = 800, height = 800;
  std::ostringstream body;

  double px(double x) const { return (x - xmin) / (xmax - xmin) * width; }
  double py(double y) const { return height - (y - ymin) / (ymax - ymin) * height; }

  void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& color,
                double stroke = 1.2) {
    if (pts.size() < 2) return;
    body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke
         << "\" points=\"";
    for (const auto& p : pts) {
      if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
      body << px(p[0]) << "," << py(p[1]) << " ";
    }
    body << "\"/>\n";
  }

  void line(double x0, double y0, double x1, double y1, const std::string& color,
            double stroke = 1.0) {
    body << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1) << "\" y2=\""
         << py(y1) << "\" stroke=\"" << color << "\" stroke-width=\"" << stroke << "\"/>\n";
  }

  void dot(double x, double y, const std::string& color, double r = 3) {
    body << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << r << "\" fill=\""
         << color << "\"/>\n";
  }

  std::string finish() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
    return out.str();
  }
};

/// affine chart of a homogeneous point: (v2/v1, v3/v1) -- the drawing chart
/// in which the base conic is the unit circle
inline std::array<double, 2> conic_chart(const Vec3& v) { return {v[1] / v[0], v[2] / v[0]}; }

/// standard affine chart (v1/v3, v2/v3)
inline std::array<double, 2> affine_chart(const Vec3& v) { return {v[0] / v[2], v[1] / v[2]}; }

namespace io_detail {

inline void draw_envelope(SvgCanvas& canvas, const std::vector<Vec3>& reps,
                          const std::string& color) {
  std::vector<std::array<double, 2>> pts;
  for (const Vec3& b : reps) {
    if (std::abs(b[0]) < 1e-6 * b.norm()) {
      canvas.polyline(pts, color);
      pts.clear();
      continue;
    }
    auto xy = conic_chart(b);
    if (std::abs(xy[0]) > 6 || std::abs(xy[1]) > 6) {
      canvas.polyline(pts, color);
      pts.clear();
      continue;
    }
    pts.push_back(xy);
  }
  canvas.polyline(pts, color);
}

}  // namespace io_detail

/// The mates figure: the unit circle plus a family of mate envelopes
/// [B(t)] = [-y' A + y A'] drawn in the chart where the base conic is the
/// unit circle. Envelopes continued through the second parameter chart wrap
/// around the circle.
inline std::string circle_mates_svg(const std::vector<MateLoop>& loops) {
  SvgCanvas canvas;
  canvas.xmin = -4;
  canvas.xmax = 4;
  canvas.ymin = -4;
  canvas.ymax = 4;
  std::vector<std::array<double, 2>> circ;
  for (int i = 0; i <= 200; ++i) {
    double a = 2 * M_PI * i / 200;
    circ.push_back({std::cos(a), std::sin(a)});
  }
  canvas.polyline(circ, "black", 2.0);
  const char* colors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400",
                          "#16a085", "#7f8c8d", "#f39c12", "#2c3e50", "#e74c3c"};
  int ci = 0;
  for (const auto& loop : loops) {
    io_detail::draw_envelope(canvas, loop.envelope, colors[ci % 10]);
    ++ci;
  }
  return canvas.finish();
}

inline std::string circle_mates_svg(const std::vector<MateSolution>& mates) {
  std::vector<MateLoop> loops;
  for (const auto& ms : mates) {
    MateLoop loop;
    for (std::size_t i = 0; i < ms.y.ts.size(); i += 2)
      loop.envelope.push_back(ms.b_jets(ms.y.ts[i])[0]);
    loop.switch_index = loop.envelope.size();
    loops.push_back(loop);
  }
  return circle_mates_svg(loops);
}

/// The orbit-pair figure: q(t) and the envelope of the partner line family.
inline std::string wcurve_svg(const WCurvePair& pair, double t0, double t1, int n = 600) {
  SvgCanvas canvas;
  canvas.xmin = -5;
  canvas.xmax = 5;
  canvas.ymin = -5;
  canvas.ymax = 5;
  std::vector<std::array<double, 2>> qs, ps;
  for (int i = 0; i <= n; ++i) {
    double t = t0 + (t1 - t0) * i / n;
    CurveJets q = pair.q_curve.jets(t);
    if (std::abs(q[0][2]) > 1e-8) qs.push_back(affine_chart(q[0]));
    // partner envelope: p* = p x p' = -Y q (orbit identity)
    CurveJets pc = pair.p_curve.jets(t);
    Covec3 p0{pc[0][0], pc[0][1], pc[0][2]};
    Covec3 p1{pc[1][0], pc[1][1], pc[1][2]};
    Vec3 pstar = cross_cc(p0, p1);
    if (std::abs(pstar[2]) > 1e-8 * pstar.norm()) ps.push_back(affine_chart(pstar));
  }
  canvas.polyline(qs, "#2980b9", 2.0);
  canvas.polyline(ps, "#c0392b", 2.0);
  return canvas.finish();
}

/// Rolling overlay: base curve, its osculating conic at t0, one development,
/// and a family of transported lines.
inline std::string rolling_svg(const LFCurve& lf, double t_mark, int n_lines = 7) {
  SvgCanvas canvas;
  canvas.xmin = -4;
  canvas.xmax = 4;
  canvas.ymin = -4;
  canvas.ymax = 4;
  double lo = lf.tbar_min + 0.05 * (lf.tbar_max - lf.tbar_min);
  double hi = lf.tbar_max - 0.05 * (lf.tbar_max - lf.tbar_min);
  // base curve
  std::vector<std::array<double, 2>> base;
  for (int i = 0; i <= 400; ++i) {
    double t = lo + (hi - lo) * i / 400;
    Vec3 v = lf.jets(t)[0];
    if (std::abs(v[2]) > 1e-8 * v.norm()) base.push_back(affine_chart(v));
  }
  canvas.polyline(base, "black", 2.0);
  // osculating conic at t_mark: parametrized as A + u A' + u^2/2 A''
  std::array<Vec3, 5> a = lf.jets(t_mark);
  std::vector<std::array<double, 2>> conic;
  for (int i = 0; i <= 400; ++i) {
    double th = -M_PI / 2 + M_PI * i / 400;
    double u = std::tan(th);
    Vec3 v = a[0] + u * a[1] + 0.5 * u * u * a[2];
    if (std::abs(v[2]) > 1e-6 * v.norm()) {
      auto xy = affine_chart(v);
      if (std::abs(xy[0]) < 20 && std::abs(xy[1]) < 20) conic.push_back(xy);
    }
  }
  canvas.polyline(conic, "#27ae60", 1.2);
  // the second-derivative development
  Development dev = development(lf, true);
  std::vector<std::array<double, 2>> devpts;
  for (int i = 0; i <= 400; ++i) {
    double t = lo + (hi - lo) * i / 400;
    Vec3 v = dev.point(t);
    if (std::abs(v[2]) > 1e-6 * v.norm()) {
      auto xy = affine_chart(v);
      if (std::abs(xy[0]) < 20 && std::abs(xy[1]) < 20) devpts.push_back(xy);
    }
  }
  canvas.polyline(devpts, "#8e44ad", 1.2);
  // transported line family from the line joining A(t_mark) and A''(t_mark)
  ProjLine ell0(cross_vv(a[0], a[2]));
  for (int k = 0; k <= n_lines; ++k) {
    double t1 = lo + (hi - lo) * k / n_lines;
    try {
      ProjLine moved = parallel_transport_line(lf, ell0, t_mark, t1);
      // draw the affine trace of the line: points with moved . v = 0
      Covec3 l = moved.rep;
      // parametrize: choose two far-apart points on the line in the chart
      // l1 x + l2 y + l3 = 0
      if (std::abs(l[1]) > 1e-8) {
        double x0 = -6, x1 = 6;
        canvas.line(x0, -(l[0] * x0 + l[2]) / l[1], x1, -(l[0] * x1 + l[2]) / l[1], "#d35400",
                    0.7);
      } else if (std::abs(l[0]) > 1e-8) {
        double x = -l[2] / l[0];
        canvas.line(x, -6, x, 6, "#d35400", 0.7);
      }
    } catch (const std::exception&) {
      // transported line degenerates off-window; skip
    }
  }
  Vec3 mark = lf.jets(t_mark)[0];
  if (std::abs(mark[2]) > 1e-8) {
    auto xy = affine_chart(mark);
    canvas.dot(xy[0], xy[1], "black");
  }
  return canvas.finish();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << content;
}

}  // namespace dancing

#endif  // DANCING_IO_HPP
