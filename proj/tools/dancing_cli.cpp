/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

// Command-line front end: verification suites, quadric integrations, mate
// solving, curvature reports, and CSV/SVG emission.
//
// Exit codes: 0 all checks passed, 1 a check failed or a computation was
// singular, 2 usage error.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "dancing/io.hpp"
#include "dancing/verify.hpp"

using namespace dancing;

namespace {

int cmd_verify(const std::string& suite, std::uint64_t seed, double tol, const std::string& out_path) {
  std::vector<std::string> names;
  if (suite == "all")
    names = suite_names();
  else
    names = {suite};
  nlohmann::json full = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& name : names) {
    std::vector<Check> checks = run_suite(name, seed, tol);
    nlohmann::json j = report_json(name, seed, checks);
    all_pass = all_pass && j["pass"].get<bool>();
    full.push_back(j);
  }
  nlohmann::json report;
  report["schema"] = 1;
  report["seed"] = seed;
  report["suites"] = full;
  report["pass"] = all_pass;
  std::string text = report.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return all_pass ? 0 : 1;
}

Q5Point parse_point(const std::vector<double>& q, const std::vector<double>& p) {
  Vec3 qv{q[0], q[1], q[2]};
  Covec3 pv{p[0], p[1], p[2]};
  double pq = pv * qv;
  if (std::abs(pq) < 1e-12) throw CLI::ValidationError("--q/--p", "pair pairing must be nonzero");
  return Q5Point(qv, pv / pq);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the quadric flow p' = q x q', its distribution,\n"
               "the dancing metric, and the projective rolling dictionary"};
  app.require_subcommand(1);

  // ---- verify ----
  std::string suite = "all";
  std::uint64_t seed = 1;
  double tol = 1e-10;
  std::string out_path;
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite, print a JSON report");
  verify->add_option("--suite", suite, "octonion|distribution|symmetry|metric|curvature|mates|rolling|all")
      ->check(CLI::IsMember({"octonion", "distribution", "symmetry", "metric", "curvature",
                             "mates", "rolling", "all"}));
  verify->add_option("--seed", seed, "random seed (reports are reproducible per seed)");
  verify->add_option("--tol", tol, "integration tolerance used by trajectory checks");
  verify->add_option("--out", out_path, "write the JSON report to this file");

  // ---- integrate ----
  double t0 = 0, t1 = 1, step_tol = 1e-10;
  std::vector<double> q0 = {0, 0, 1}, p0 = {0, 0, 1};
  std::string traj_out = "trajectory.csv";
  std::uint64_t iseed = 1;
  CLI::App* integ = app.add_subcommand("integrate", "integrate the flow with a random smooth control, write CSV");
  integ->add_option("--t0", t0, "start time");
  integ->add_option("--t1", t1, "end time");
  integ->add_option("--step-tol", step_tol, "integration tolerance");
  integ->add_option("--seed", iseed, "seed for the control coefficients");
  integ->add_option("--q", q0, "initial point homogeneous coordinates")->expected(3);
  integ->add_option("--p", p0, "initial line homogeneous coordinates")->expected(3);
  integ->add_option("--out", traj_out, "output CSV path");

  // ---- mates ----
  bool mates_circle = false;
  double y0 = 1.0, y1v = 0.0, y2v = 1.0;
  double mt0 = -0.6, mt1 = 0.9;
  std::string mates_out = "mates.csv";
  std::string mates_svg;
  CLI::App* mates = app.add_subcommand("mates", "solve the mate equation around the conic, write CSV/SVG");
  mates->add_flag("--circle", mates_circle, "use the conic base (the only built-in base)");
  mates->add_option("--y0", y0, "initial y");
  mates->add_option("--y1", y1v, "initial y'");
  mates->add_option("--y2", y2v, "initial y''");
  mates->add_option("--t0", mt0, "window start");
  mates->add_option("--t1", mt1, "window end");
  mates->add_option("--out", mates_out, "output CSV path");
  mates->add_option("--svg", mates_svg, "also write an envelope SVG to this path");

  // ---- wcurve ----
  std::string family = "Y3";
  double param = 1.0;
  double wt0 = -1.0, wt1 = 1.0;
  std::string wcurve_out;
  std::string wcurve_svg_path;
  CLI::App* wc = app.add_subcommand("wcurve", "constant-curvature orbit pairs");
  wc->add_option("--family", family, "Y1|Y2|Y3")->check(CLI::IsMember({"Y1", "Y2", "Y3"}));
  wc->add_option("--param", param, "family parameter (a > 0 or b > 0)");
  wc->add_option("--t0", wt0, "window start");
  wc->add_option("--t1", wt1, "window end");
  wc->add_option("--out", wcurve_out, "orbit CSV path");
  wc->add_option("--svg", wcurve_svg_path, "pair figure SVG path");

  // ---- curvature ----
  double cx = 0.3, cy = 0.9, ca = -0.4, cb = 0.2;
  std::string curv_out;
  CLI::App* curv = app.add_subcommand("curvature", "curvature report at a chart point (JSON)");
  curv->add_option("--x", cx, "point x");
  curv->add_option("--y", cy, "point y");
  curv->add_option("--a", ca, "line slope a");
  curv->add_option("--b", cb, "line offset b");
  curv->add_option("--out", curv_out, "write JSON here instead of stdout");

  // ---- figure ----
  std::string figure_kind;
  std::string fig_out = "figure.svg";
  std::string fig_family = "Y1";
  double fig_param = 1.0;
  int fig_envelopes = 10;
  CLI::App* fig = app.add_subcommand("figure", "emit an SVG figure");
  fig->add_option("kind", figure_kind, "circle-mates | wcurve | rolling")->required();
  fig->add_option("--out", fig_out, "output SVG path");
  fig->add_option("--family", fig_family, "orbit family for the wcurve figure");
  fig->add_option("--param", fig_param, "orbit family parameter");
  fig->add_option("--envelopes", fig_envelopes, "number of envelope curves (circle-mates)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return cmd_verify(suite, seed, tol, out_path);

    if (integ->parsed()) {
      Rng rng(iseed);
      Vec3 a = rng.vec3(0.4), b = rng.vec3(0.4), c = rng.vec3(0.4);
      Control u = [a, b, c](double t) {
        return std::cos(t) * a + std::sin(0.7 * t) * b + std::cos(1.3 * t + 0.4) * c;
      };
      Q5Trajectory tr = integrate(parse_point(q0, p0), u, t0, t1, step_tol);
      write_file(traj_out, trajectory_csv(tr));
      std::cout << "samples: " << tr.samples.size()
                << "  max |pq-1|: " << tr.max_constraint_drift
                << "  defect: " << tr.midpoint_residual() << "\n";
      return tr.max_constraint_drift < 1e-9 ? 0 : 1;
    }

    if (mates->parsed()) {
      if (!mates_circle) {
        std::cerr << "mates: only the --circle base is built in\n";
        return 2;
      }
      MateSolution ms = circle_mates({y0, y1v, y2v}, {mt0, mt1});
      write_file(mates_out, mate_csv(ms));
      MateReport rep = mate_verify(ms, 20);
      std::cout << "dancing residual: " << rep.dancing_residual
                << "  parallel SD: " << rep.parallel_sd
                << "  shared a1: " << rep.shared_a1_residual << "\n";
      if (!mates_svg.empty()) write_file(mates_svg, circle_mates_svg({ms}));
      return rep.dancing_residual < 1e-7 ? 0 : 1;
    }

    if (wc->parsed()) {
      WCurveSpec spec = wcurve_make(family, param);
      std::cout << "family " << spec.family << "  char poly l^3 + (" << spec.a1 << ") l + ("
                << spec.a0 << ")  kappa = " << spec.kappa << "\n";
      WCurvePair pair = wcurve_pair(spec);
      if (!wcurve_out.empty()) {
        std::string csv = "t,q1,q2,q3,p1,p2,p3\n";
        char buf[256];
        for (int i = 0; i <= 400; ++i) {
          double t = wt0 + (wt1 - wt0) * i / 400;
          CurveJets q = pair.q_curve.jets(t);
          CurveJets pc = pair.p_curve.jets(t);
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, q[0][0],
                        q[0][1], q[0][2], pc[0][0], pc[0][1], pc[0][2]);
          csv += buf;
        }
        write_file(wcurve_out, csv);
      }
      if (!wcurve_svg_path.empty()) write_file(wcurve_svg_path, wcurve_svg(pair, wt0, wt1));
      return 0;
    }

    if (curv->parsed()) {
      CurvatureReport rep = curvature_report(ChartPoint(cx, cy, ca, cb));
      std::string text = report_to_json(rep).dump(2) + "\n";
      if (curv_out.empty())
        std::cout << text;
      else
        write_file(curv_out, text);
      return 0;
    }

    if (fig->parsed()) {
      if (figure_kind == "circle-mates") {
        std::vector<MateLoop> loops;
        for (int k = 0; k < fig_envelopes; ++k) {
          double phase = 0.25 + 1.5 * k / std::max(1, fig_envelopes - 1);
          try {
            loops.push_back(circle_mates_loop({1.0, 0.2 * (k % 3) - 0.2, phase}, -0.9));
          } catch (const std::domain_error&) {
            // branch hits y = 0 inside the window; skip it
          }
        }
        write_file(fig_out, circle_mates_svg(loops));
        std::cout << "envelopes: " << loops.size() << "\n";
        return static_cast<int>(loops.size()) >= std::min(8, fig_envelopes) ? 0 : 1;
      }
      if (figure_kind == "wcurve") {
        WCurveSpec spec = wcurve_make(fig_family, fig_param);
        std::cout << "kappa = " << spec.kappa << "\n";
        write_file(fig_out, wcurve_svg(wcurve_pair(spec), -2.0, 2.0));
        return 0;
      }
      if (figure_kind == "rolling") {
        Mat3 y = wcurve_make("Y2", 1.0).y;
        LFCurve lf = lf_normalize(PlaneCurve::orbit(y, basis_vec(2)), -0.9, 0.9);
        write_file(fig_out, rolling_svg(lf, 0.5 * (lf.tbar_min + lf.tbar_max)));
        return 0;
      }
      std::cerr << "unknown figure kind: " << figure_kind << "\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
