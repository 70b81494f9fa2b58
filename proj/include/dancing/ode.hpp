/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_ODE_HPP
#define DANCING_ODE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) with PI step-size
// control, on flat double vectors. Callers layer constraint projections on
// top of accepted steps.

namespace dancing {

using OdeRhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 0.0;  // 0 = unlimited
  /// called after each accepted step; may project the state onto a constraint
  std::function<void(double, std::vector<double>&)> poststep;
};

namespace detail {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// Integrate from t0 to t1 (t1 > t0), invoking `observe` at every requested
/// output time in `t_out` (which must be increasing and within [t0, t1]).
/// Throws std::runtime_error on step-size underflow.
inline void ode_integrate(const OdeRhs& rhs, double t0, double t1, std::vector<double> y,
                          const OdeOptions& opt, const std::vector<double>& t_out,
                          const std::function<void(double, const std::vector<double>&)>& observe) {
  using namespace detail;
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
  double t = t0;
  double h = opt.h_init;
  if (opt.h_max > 0) h = std::min(h, opt.h_max);
  std::size_t out_idx = 0;
  auto emit_until = [&](double tcur, const std::vector<double>& ycur) {
    while (out_idx < t_out.size() && t_out[out_idx] <= tcur + 1e-12 * (1.0 + std::abs(tcur))) {
      observe(t_out[out_idx], ycur);
      ++out_idx;
    }
  };
  rhs(t, y, k1);
  emit_until(t, y);
  double err_prev = 1.0;
  int consecutive_rejects = 0;
  while (t < t1 - 1e-14) {
    // do not step across the next output time
    double h_lim = t1 - t;
    if (out_idx < t_out.size()) h_lim = std::min(h_lim, t_out[out_idx] - t);
    if (h_lim < 1e-15) {  // output time essentially reached
      emit_until(t + 1e-14, y);
      continue;
    }
    bool clipped = h >= h_lim;
    double hs = clipped ? h_lim : h;
    // stages
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    rhs(t + c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + hs, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + hs, ynew, k7);
    // error estimate
    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double r = e / sc;
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(n));
    if (err <= 1.0) {
      t += hs;
      // snap onto the requested output time so downstream uniform-grid
      // stencils see an exactly uniform grid
      if (out_idx < t_out.size() && std::abs(t - t_out[out_idx]) < 1e-12 * (1.0 + std::abs(t)))
        t = t_out[out_idx];
      y = ynew;
      if (opt.poststep) opt.poststep(t, y);
      rhs(t, y, k1);  // FSAL would reuse k7; recompute because poststep may project
      emit_until(t, y);
      // PI controller
      double e_clip = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e_clip, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      fac = std::max(0.2, std::min(5.0, fac));
      double h_next = hs * fac;
      if (!clipped || h_next < h) h = h_next;
      if (opt.h_max > 0) h = std::min(h, opt.h_max);
      err_prev = e_clip;
      consecutive_rejects = 0;
    } else {
      h = hs * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (++consecutive_rejects > 60 || h < opt.h_min)
        throw std::runtime_error("ode_integrate: step-size underflow (stiff/singular)");
    }
  }
  emit_until(t1 + 1.0, y);
}

}  // namespace dancing

#endif  // DANCING_ODE_HPP
