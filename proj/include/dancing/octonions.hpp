/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_OCTONIONS_HPP
#define DANCING_OCTONIONS_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dancing/linalg.hpp"
#include "dancing/numeric.hpp"

// Zorn vector-matrix model of the split octonions, their derivation algebra,
// the one-form Omega = zeta * d zeta and the embedding of the quadric
// {pq = 1} into the projectivized null cone.
//
// Sign conventions follow Zorn's original product
//
//   (x, q; p, y) * (x', q'; p', y')
//     = (x x' - p' q,  x q' + y' q + p x p';  x' p + y p' + q x q',  y y' - p q')
//
// with q x q' = vol(q, q', .) and p x p' = vol*(p, p', .). Other sources
// (e.g. the Wikipedia article) differ by p -> -p; the formulas downstream
// (the pull-back of Omega, the explicit symmetry fields) depend on this
// choice, so it is fixed here once.

namespace dancing {

struct ZornOctonion {
  double x = 0;
  Vec3 q;
  Covec3 p;
  double y = 0;

  ZornOctonion() = default;
  ZornOctonion(double x_, const Vec3& q_, const Covec3& p_, double y_)
      : x(x_), q(q_), p(p_), y(y_) {}

  static ZornOctonion unit() { return {1.0, Vec3(), Covec3(), 1.0}; }

  ZornOctonion operator+(const ZornOctonion& o) const { return {x + o.x, q + o.q, p + o.p, y + o.y}; }
  ZornOctonion operator-(const ZornOctonion& o) const { return {x - o.x, q - o.q, p - o.p, y - o.y}; }
  friend ZornOctonion operator*(double s, const ZornOctonion& z) {
    return {s * z.x, s * z.q, s * z.p, s * z.y};
  }

  double norm_inf() const {
    double r = std::max(std::abs(x), std::abs(y));
    for (int i = 0; i < 3; ++i) r = std::max({r, std::abs(q[i]), std::abs(p[i])});
    return r;
  }
  double norm2() const {
    double s = x * x + y * y;
    for (int i = 0; i < 3; ++i) s += q[i] * q[i] + p[i] * p[i];
    return std::sqrt(s);
  }
};

/// Imaginary split octonion: y = -x.
struct ImOctonion {
  double x = 0;
  Vec3 q;
  Covec3 p;

  ImOctonion() = default;
  ImOctonion(double x_, const Vec3& q_, const Covec3& p_) : x(x_), q(q_), p(p_) {}

  ZornOctonion embed() const { return {x, q, p, -x}; }

  /// the quadratic form x^2 - pq whose null cone carries the distribution
  double cone_form() const { return x * x - p * q; }
};

/// Parameters (A, b, c) in sl3 + R^3 + (R^3)* of a derivation.
struct G2Param {
  Mat3 A;   // trace-free
  Vec3 b;
  Covec3 c;

  G2Param() = default;
  G2Param(const Mat3& A_, const Vec3& b_, const Covec3& c_) : A(A_), b(b_), c(c_) {
    if (std::abs(A.trace()) > 1e-12 * (1.0 + A.max_abs()))
      throw std::invalid_argument("G2Param: A must be trace-free");
  }

  G2Param operator-(const G2Param& o) const { return {A - o.A, b - o.b, c - o.c}; }
  double norm_inf() const {
    double r = A.max_abs();
    for (int i = 0; i < 3; ++i) r = std::max({r, std::abs(b[i]), std::abs(c[i])});
    return r;
  }
};

inline ZornOctonion zorn_mul(const ZornOctonion& z1, const ZornOctonion& z2) {
  return {z1.x * z2.x - z2.p * z1.q,
          z1.x * z2.q + z2.y * z1.q + cross_cc(z1.p, z2.p),
          z2.x * z1.p + z1.y * z2.p + cross_vv(z1.q, z2.q),
          z1.y * z2.y - z1.p * z2.q};
}

inline ZornOctonion zorn_conj(const ZornOctonion& z) { return {z.y, -z.q, -z.p, z.x}; }

/// <zeta, zeta> = xy + pq, signature (4,4).
inline double zorn_norm(const ZornOctonion& z) { return z.x * z.y + z.p * z.q; }

inline ZornOctonion zorn_re(const ZornOctonion& z) {
  double r = 0.5 * (z.x + z.y);
  return {r, Vec3(), Covec3(), r};
}
inline ZornOctonion zorn_im(const ZornOctonion& z) {
  double d = 0.5 * (z.x - z.y);
  return {d, z.q, z.p, -d};
}

/// The derivation with parameters (A,b,c) applied to zeta; kills Re(zeta).
inline ZornOctonion derivation_apply(const G2Param& g, const ZornOctonion& z) {
  double diag = z.p * g.b + g.c * z.q;
  double xy = z.x - z.y;
  return {diag,
          g.A * z.q + xy * g.b + cross_cc(z.p, g.c),
          -(z.p * g.A) + cross_vv(g.b, z.q) + xy * g.c,
          -diag};
}

// ---------------------------------------------------------------------------
// The 7x7 matrix of the derivation on Im, in the ordered basis
// (q-block, p-block, x):
//
//   [ A    R_c   2b ]         R_c : p |-> p x c
//   [ L_b  -A^t  2c ]         L_b : q |-> b x q
//   [ c^t  b^t   0  ]
// ---------------------------------------------------------------------------

using Mat7 = Eigen::Matrix<double, 7, 7>;

inline Mat7 rho7(const G2Param& g) {
  Mat7 m = Mat7::Zero();
  // A block and -A^t block
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      m(i, j) = g.A(i, j);
      m(3 + i, 3 + j) = -g.A(j, i);
    }
  // R_c: column of (e^j x c) placed at p-slot j
  for (int j = 0; j < 3; ++j) {
    Vec3 col = cross_cc(basis_covec(j), g.c);
    for (int i = 0; i < 3; ++i) m(i, 3 + j) = col[i];
  }
  // L_b: column of (b x e_j) at q-slot j
  for (int j = 0; j < 3; ++j) {
    Covec3 col = cross_vv(g.b, basis_vec(j));
    for (int i = 0; i < 3; ++i) m(3 + i, j) = col[i];
  }
  for (int i = 0; i < 3; ++i) {
    m(i, 6) = 2 * g.b[i];
    m(3 + i, 6) = 2 * g.c[i];
    m(6, i) = g.c[i];
    m(6, 3 + i) = g.b[i];
  }
  return m;
}

/// Read (A, b, c) blocks off a 7x7 matrix; residual is the distance to the
/// rho-image (should vanish for commutators of derivations).
inline G2Param rho7_decompose(const Mat7& m, double* residual = nullptr) {
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = m(i, j);
  Vec3 b{m(0, 6) / 2, m(1, 6) / 2, m(2, 6) / 2};
  Covec3 c{m(3, 6) / 2, m(4, 6) / 2, m(5, 6) / 2};
  double tr = a.trace() / 3.0;
  a(0, 0) -= tr;
  a(1, 1) -= tr;
  a(2, 2) -= tr;
  G2Param g(a, b, c);
  if (residual) {
    Mat7 diff = m - rho7(g);
    *residual = diff.cwiseAbs().maxCoeff();
  }
  return g;
}

/// Commutator of two derivations, decomposed back into parameters.
/// Throws if the decomposition residual exceeds 1e-8 (closure failure would
/// be an implementation bug, not bad input).
inline G2Param g2_bracket(const G2Param& g1, const G2Param& g2) {
  Mat7 c = rho7(g1) * rho7(g2) - rho7(g2) * rho7(g1);
  double res = 0;
  G2Param out = rho7_decompose(c, &res);
  double scale = 1.0 + g1.norm_inf() * g2.norm_inf();
  if (res > 1e-8 * scale) throw std::logic_error("g2_bracket: commutator not in image");
  return out;
}

/// 14-element standard basis: sl3 (E_ij, H1, H2), then b = e_i, then c = e^i.
inline std::vector<G2Param> g2_basis() {
  std::vector<G2Param> basis;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      Mat3 e;
      e(i, j) = 1.0;
      basis.emplace_back(e, Vec3(), Covec3());
    }
  Mat3 h1;
  h1(0, 0) = 1;
  h1(1, 1) = -1;
  basis.emplace_back(h1, Vec3(), Covec3());
  Mat3 h2;
  h2(1, 1) = 1;
  h2(2, 2) = -1;
  basis.emplace_back(h2, Vec3(), Covec3());
  for (int i = 0; i < 3; ++i) basis.emplace_back(Mat3(), basis_vec(i), Covec3());
  for (int i = 0; i < 3; ++i) basis.emplace_back(Mat3(), Vec3(), basis_covec(i));
  return basis;
}

// ---------------------------------------------------------------------------
// Omega = zeta * d zeta on Im, and its pull-back by iota(q,p) = (q,p,1)
// ---------------------------------------------------------------------------

/// Value of Omega at z on the tangent vector dz (both imaginary).
inline ZornOctonion omega_at(const ImOctonion& z, const ImOctonion& dz) {
  return zorn_mul(z.embed(), dz.embed());
}

/// 8x7 component matrix of Omega at z (tangent coordinates dq, dp, dx).
inline Eigen::Matrix<double, 8, 7> omega_matrix(const ImOctonion& z) {
  Eigen::Matrix<double, 8, 7> m;
  for (int k = 0; k < 7; ++k) {
    ImOctonion dz;
    if (k < 3)
      dz.q[k] = 1.0;
    else if (k < 6)
      dz.p[k - 3] = 1.0;
    else
      dz.x = 1.0;
    ZornOctonion w = omega_at(z, dz);
    m(0, k) = w.x;
    for (int i = 0; i < 3; ++i) m(1 + i, k) = w.q[i];
    for (int i = 0; i < 3; ++i) m(4 + i, k) = w.p[i];
    m(7, k) = w.y;
  }
  return m;
}

/// Numeric kernel rank of Omega restricted to the ambient Im at z.
inline int omega_kernel_rank(const ImOctonion& z) {
  return 7 - numeric_rank(omega_matrix(z));
}

/// Components of the pulled-back form iota* Omega on the tangent (dq, dp) at
/// a point with pq = 1:
///
///   [ -q dp          dq + p x dp ]
///   [ -dp + q x dq   -p dq       ]
///
/// The norm vanishes exactly on the distribution plane.
struct IotaPullback {
  double top_left;    // -q . dp
  Vec3 top_right;     // dq + p x dp
  Covec3 bottom_left; // -dp + q x dq
  double bottom_right;// -p . dq

  double norm() const {
    double s = top_left * top_left + bottom_right * bottom_right;
    for (int i = 0; i < 3; ++i) s += top_right[i] * top_right[i] + bottom_left[i] * bottom_left[i];
    return std::sqrt(s);
  }
};

inline IotaPullback iota_pullback(const Vec3& q, const Covec3& p, const Vec3& dq, const Covec3& dp) {
  IotaPullback r;
  r.top_left = -(dp * q);
  r.top_right = dq + cross_cc(p, dp);
  r.bottom_left = -dp + cross_vv(q, dq);
  r.bottom_right = -(p * dq);
  return r;
}

}  // namespace dancing

#endif  // DANCING_OCTONIONS_HPP
