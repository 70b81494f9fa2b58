/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_NUMERIC_HPP
#define DANCING_NUMERIC_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

#include "dancing/linalg.hpp"

// Shared numerical machinery: deterministic random streams, numeric rank,
// small eigenproblems, finite-difference stencils and truncated jets.

namespace dancing {

// ---------------------------------------------------------------------------
// Deterministic random stream. The standard distributions are implementation
// defined, so uniforms are produced directly from the 64-bit state; reports
// generated from the same seed are byte-identical across platforms.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next_u64() {
    // xorshift* variant
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1Dull;
  }

  /// uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// uniform in [a,b)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// rough normal via sum of uniforms (smooth sampling; tails are irrelevant here)
  double normal() {
    double s = 0;
    for (int i = 0; i < 12; ++i) s += uniform();
    return s - 6.0;
  }

  Vec3 vec3(double scale = 1.0) { return {scale * normal(), scale * normal(), scale * normal()}; }
  Covec3 covec3(double scale = 1.0) { return {scale * normal(), scale * normal(), scale * normal()}; }

  Mat3 mat3(double scale = 1.0) {
    Mat3 a;
    for (int i = 0; i < 9; ++i) a.m[i] = scale * normal();
    return a;
  }
  /// random traceless matrix
  Mat3 sl3(double scale = 1.0) {
    Mat3 a = mat3(scale);
    double tr = a.trace() / 3.0;
    a(0, 0) -= tr;
    a(1, 1) -= tr;
    a(2, 2) -= tr;
    return a;
  }
  /// random unimodular matrix reasonably far from singular
  Mat3 sl3_group(double scale = 0.5) {
    for (;;) {
      Mat3 a = mat3(scale);
      double d = a.det();
      if (std::abs(d) < 0.05) continue;
      double s = cbrt_real(1.0 / d);
      return s * a;
    }
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Numeric rank and small eigenproblems (Eigen-backed)
// ---------------------------------------------------------------------------

/// Rank with singular values below rel_eps * sigma_max counted as zero.
inline int numeric_rank(const Eigen::MatrixXd& m, double rel_eps = kRankEps) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_eps * s(0)) ++r;
  return r;
}

inline std::vector<double> singular_values(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  return out;
}

/// Eigenvalues of a real 3x3 matrix (possibly complex).
inline std::array<std::complex<double>, 3> eig3(const Mat3& a) {
  Eigen::Matrix3d e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = a(i, j);
  Eigen::EigenSolver<Eigen::Matrix3d> es(e);
  return {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Central first derivative, one Richardson level.
inline double fd_d1(const std::function<double(double)>& f, double t, double h = 1e-4) {
  auto d = [&](double hh) { return (f(t + hh) - f(t - hh)) / (2 * hh); };
  double a = d(h), b = d(h / 2);
  return (4 * b - a) / 3;
}

/// 7-point central stencils on a uniform grid (interior: 6th/4th order).
/// Returns derivatives 1..3 of the sample sequence at index i.
struct StencilDerivs {
  double d1, d2, d3;
};

inline StencilDerivs stencil7(const std::vector<double>& f, std::size_t i, double h) {
  // requires 3 <= i <= n-4
  const double* c = f.data() + i;
  double d1 = (-c[-3] + 9 * c[-2] - 45 * c[-1] + 45 * c[1] - 9 * c[2] + c[3]) / (60 * h);
  double d2 = (2 * c[-3] - 27 * c[-2] + 270 * c[-1] - 490 * c[0] + 270 * c[1] - 27 * c[2] + 2 * c[3]) /
              (180 * h * h);
  double d3 = (c[-3] - 8 * c[-2] + 13 * c[-1] - 13 * c[1] + 8 * c[2] - c[3]) / (8 * h * h * h);
  return {d1, d2, d3};
}

// ---------------------------------------------------------------------------
// Truncated jets (value + derivatives up to a fixed order) for exact
// reparametrization/rescaling chain rules along curves.
// ---------------------------------------------------------------------------

template <int N>  // N = highest derivative carried
struct Jet {
  double d[N + 1]{};  // d[k] = k-th derivative

  Jet() = default;
  explicit Jet(double v) { d[0] = v; }
  static Jet variable(double v) {
    Jet j;
    j.d[0] = v;
    if constexpr (N >= 1) j.d[1] = 1.0;
    return j;
  }

  Jet operator+(const Jet& o) const {
    Jet r;
    for (int k = 0; k <= N; ++k) r.d[k] = d[k] + o.d[k];
    return r;
  }
  Jet operator-(const Jet& o) const {
    Jet r;
    for (int k = 0; k <= N; ++k) r.d[k] = d[k] - o.d[k];
    return r;
  }
  Jet operator-() const {
    Jet r;
    for (int k = 0; k <= N; ++k) r.d[k] = -d[k];
    return r;
  }
  friend Jet operator*(double s, const Jet& a) {
    Jet r;
    for (int k = 0; k <= N; ++k) r.d[k] = s * a.d[k];
    return r;
  }

  /// Leibniz product of derivative sequences.
  Jet operator*(const Jet& o) const {
    Jet r;
    for (int k = 0; k <= N; ++k) {
      double s = 0;
      double binom = 1;
      for (int j = 0; j <= k; ++j) {
        s += binom * d[j] * o.d[k - j];
        binom = binom * (k - j) / (j + 1);
      }
      r.d[k] = s;
    }
    return r;
  }

  /// Reciprocal jet (requires nonzero value).
  Jet inv() const {
    Jet r;
    r.d[0] = 1.0 / d[0];
    for (int k = 1; k <= N; ++k) {
      // (f * g = 1)^{(k)} -> solve for g^{(k)}
      double s = 0;
      double binom = 1;
      for (int j = 1; j <= k; ++j) {
        binom = binom * (k - j + 1) / j;
        s += binom * d[j] * r.d[k - j];
      }
      r.d[k] = -s / d[0];
    }
    return r;
  }

  Jet operator/(const Jet& o) const { return (*this) * o.inv(); }

  /// Drop to the derivative: jet of f' carried to order N-1 (top slot zeroed).
  Jet shift() const {
    Jet r;
    for (int k = 0; k < N; ++k) r.d[k] = d[k + 1];
    r.d[N] = 0.0;
    return r;
  }
};

template <int N>
struct JetVec3 {
  Jet<N> c[3];

  Vec3 at(int k) const { return {c[0].d[k], c[1].d[k], c[2].d[k]}; }
  static JetVec3 from(const std::vector<Vec3>& derivs) {
    JetVec3 r;
    for (int k = 0; k <= N && k < static_cast<int>(derivs.size()); ++k)
      for (int i = 0; i < 3; ++i) r.c[i].d[k] = derivs[static_cast<std::size_t>(k)][i];
    return r;
  }
  JetVec3 operator+(const JetVec3& o) const {
    JetVec3 r;
    for (int i = 0; i < 3; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  JetVec3 operator-(const JetVec3& o) const {
    JetVec3 r;
    for (int i = 0; i < 3; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
  friend JetVec3 operator*(const Jet<N>& s, const JetVec3& v) {
    JetVec3 r;
    for (int i = 0; i < 3; ++i) r.c[i] = s * v.c[i];
    return r;
  }
  JetVec3 shift() const {
    JetVec3 r;
    for (int i = 0; i < 3; ++i) r.c[i] = c[i].shift();
    return r;
  }
};

/// Reparametrize a jet: given f-jets of a scalar u(t) and of the parameter
/// speed w = dtbar/dt, produce derivatives of u with respect to tbar at the
/// same point: (d/dtbar)^k u, k = 0..M (M <= N).
template <int N>
inline std::vector<double> reparam_derivs(Jet<N> u, Jet<N> w, int order) {
  std::vector<double> out;
  out.push_back(u.d[0]);
  Jet<N> cur = u;
  Jet<N> winv = w.inv();
  for (int k = 1; k <= order; ++k) {
    cur = cur.shift() * winv;  // d/dtbar = (1/w) d/dt
    out.push_back(cur.d[0]);
  }
  return out;
}

template <int N>
inline std::vector<Vec3> reparam_derivs(const JetVec3<N>& u, const Jet<N>& w, int order) {
  std::vector<Vec3> out;
  out.push_back(u.at(0));
  JetVec3<N> cur = u;
  Jet<N> winv = w.inv();
  for (int k = 1; k <= order; ++k) {
    JetVec3<N> shifted = cur.shift();
    JetVec3<N> next;
    for (int i = 0; i < 3; ++i) next.c[i] = shifted.c[i] * winv;
    cur = next;
    out.push_back(cur.at(0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------------

inline double clamp(double v, double lo, double hi) { return std::max(lo, std::min(hi, v)); }

/// Max number of worker threads honoring the DANCING_THREADS environment cap.
inline int thread_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("DANCING_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

}  // namespace dancing

#endif  // DANCING_NUMERIC_HPP
