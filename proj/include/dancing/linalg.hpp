/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_LINALG_HPP
#define DANCING_LINALG_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

// Fixed-dimension exact-shape linear algebra for the projective plane:
// column vectors (homogeneous point coordinates), row covectors (homogeneous
// line coordinates), the two volume-form cross products, 3x3 matrices with
// exponential, projective points/lines and the cross-ratio.
//
// Vec3 and Covec3 are distinct types on purpose: there is no implicit
// transpose anywhere, and the only pairing is Covec3 * Vec3.

namespace dancing {

constexpr double kRankEps = 1e-8;  // relative singular-value cutoff, uniform across modules

struct Vec3 {
  double x[3]{0.0, 0.0, 0.0};

  Vec3() = default;
  Vec3(double a, double b, double c) : x{a, b, c} {}

  double& operator[](int i) { return x[i]; }
  double operator[](int i) const { return x[i]; }

  Vec3 operator+(const Vec3& o) const { return {x[0] + o.x[0], x[1] + o.x[1], x[2] + o.x[2]}; }
  Vec3 operator-(const Vec3& o) const { return {x[0] - o.x[0], x[1] - o.x[1], x[2] - o.x[2]}; }
  Vec3 operator-() const { return {-x[0], -x[1], -x[2]}; }
  Vec3& operator+=(const Vec3& o) {
    for (int i = 0; i < 3; ++i) x[i] += o.x[i];
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    for (int i = 0; i < 3; ++i) x[i] -= o.x[i];
    return *this;
  }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x[0], s * v.x[1], s * v.x[2]}; }
  friend Vec3 operator*(const Vec3& v, double s) { return s * v; }
  Vec3 operator/(double s) const { return {x[0] / s, x[1] / s, x[2] / s}; }

  double norm() const { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }
};

struct Covec3 {
  double x[3]{0.0, 0.0, 0.0};

  Covec3() = default;
  Covec3(double a, double b, double c) : x{a, b, c} {}

  double& operator[](int i) { return x[i]; }
  double operator[](int i) const { return x[i]; }

  Covec3 operator+(const Covec3& o) const { return {x[0] + o.x[0], x[1] + o.x[1], x[2] + o.x[2]}; }
  Covec3 operator-(const Covec3& o) const { return {x[0] - o.x[0], x[1] - o.x[1], x[2] - o.x[2]}; }
  Covec3 operator-() const { return {-x[0], -x[1], -x[2]}; }
  Covec3& operator+=(const Covec3& o) {
    for (int i = 0; i < 3; ++i) x[i] += o.x[i];
    return *this;
  }
  Covec3& operator-=(const Covec3& o) {
    for (int i = 0; i < 3; ++i) x[i] -= o.x[i];
    return *this;
  }
  friend Covec3 operator*(double s, const Covec3& p) { return {s * p.x[0], s * p.x[1], s * p.x[2]}; }
  friend Covec3 operator*(const Covec3& p, double s) { return s * p; }
  Covec3 operator/(double s) const { return {x[0] / s, x[1] / s, x[2] / s}; }

  double norm() const { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }
};

/// The canonical pairing p(v). This is the only product between the two kinds.
inline double operator*(const Covec3& p, const Vec3& v) {
  return p.x[0] * v.x[0] + p.x[1] * v.x[1] + p.x[2] * v.x[2];
}

inline Vec3 basis_vec(int i) {
  Vec3 v;
  v[i] = 1.0;
  return v;
}
inline Covec3 basis_covec(int i) {
  Covec3 p;
  p[i] = 1.0;
  return p;
}

/// vol(v, w, .) — the covector-valued cross product, (v x w)_i = eps_ijk v^j w^k.
inline Covec3 cross_vv(const Vec3& v, const Vec3& w) {
  return {v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0]};
}

/// vol*(p, r, .) — the vector-valued cross product on covectors, (p x r)^i = eps^ijk p_j r_k.
inline Vec3 cross_cc(const Covec3& p, const Covec3& r) {
  return {p[1] * r[2] - p[2] * r[1], p[2] * r[0] - p[0] * r[2], p[0] * r[1] - p[1] * r[0]};
}

inline double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return cross_vv(a, b) * c; }
inline double det3(const Covec3& a, const Covec3& b, const Covec3& c) { return a * cross_cc(b, c); }

/// Real cube root preserving sign (needed where the integrand changes sign under duality).
inline double cbrt_real(double x) { return std::cbrt(x); }

// ---------------------------------------------------------------------------
// Mat3
// ---------------------------------------------------------------------------

struct Mat3 {
  // row-major
  double m[9]{0, 0, 0, 0, 0, 0, 0, 0, 0};

  Mat3() = default;
  static Mat3 identity() {
    Mat3 r;
    r.m[0] = r.m[4] = r.m[8] = 1.0;
    return r;
  }
  static Mat3 zero() { return Mat3(); }
  static Mat3 from_rows(const Covec3& r0, const Covec3& r1, const Covec3& r2) {
    Mat3 r;
    for (int j = 0; j < 3; ++j) {
      r.m[j] = r0[j];
      r.m[3 + j] = r1[j];
      r.m[6 + j] = r2[j];
    }
    return r;
  }
  static Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
      r.m[3 * i] = c0[i];
      r.m[3 * i + 1] = c1[i];
      r.m[3 * i + 2] = c2[i];
    }
    return r;
  }

  double& operator()(int i, int j) { return m[3 * i + j]; }
  double operator()(int i, int j) const { return m[3 * i + j]; }

  Vec3 col(int j) const { return {m[j], m[3 + j], m[6 + j]}; }
  Covec3 row(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }
  Mat3 operator-() const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = -m[i];
    return r;
  }
  friend Mat3 operator*(double s, const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = s * a.m[i];
    return r;
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  /// Column action g q.
  Vec3 operator*(const Vec3& v) const {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = m[3 * i] * v[0] + m[3 * i + 1] * v[1] + m[3 * i + 2] * v[2];
    return r;
  }

  double trace() const { return m[0] + m[4] + m[8]; }
  double det() const { return det3(col(0), col(1), col(2)); }

  Mat3 transpose() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  Mat3 inverse() const {
    // adjugate / det
    Mat3 r;
    const Mat3& a = *this;
    r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    double d = det();
    if (std::abs(d) < 1e-300) throw std::domain_error("Mat3::inverse: singular matrix");
    return (1.0 / d) * r;
  }

  double max_abs() const {
    double r = 0;
    for (double v : m) r = std::max(r, std::abs(v));
    return r;
  }
  double frob() const {
    double s = 0;
    for (double v : m) s += v * v;
    return std::sqrt(s);
  }
};

/// Row action p g.
inline Covec3 operator*(const Covec3& p, const Mat3& a) {
  Covec3 r;
  for (int j = 0; j < 3; ++j) r[j] = p[0] * a(0, j) + p[1] * a(1, j) + p[2] * a(2, j);
  return r;
}

inline Mat3 commutator(const Mat3& a, const Mat3& b) { return a * b - b * a; }

/// Outer product v p (rank one matrix).
inline Mat3 outer(const Vec3& v, const Covec3& p) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = v[i] * p[j];
  return r;
}

// ---------------------------------------------------------------------------
// Matrix exponential: scaling and squaring with the (13,13) Pade approximant.
// Robust for defective matrices (nilpotent blocks of the W-curve normal forms).
// ---------------------------------------------------------------------------

namespace detail {

inline void pade13(const Mat3& a, Mat3& u, Mat3& v) {
  // coefficients of the degree-13 Pade approximant to exp
  static const double b[14] = {64764752532480000., 32382376266240000., 7771770303897600.,
                               1187353796428800.,  129060195264000.,   10559470521600.,
                               670442572800.,      33522128640.,       1323241920.,
                               40840800.,          960960.,            16380.,
                               182.,               1.};
  Mat3 a2 = a * a;
  Mat3 a4 = a2 * a2;
  Mat3 a6 = a2 * a4;
  Mat3 id = Mat3::identity();
  Mat3 w1 = b[13] * a6 + b[11] * a4 + b[9] * a2;
  Mat3 w2 = b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  u = a * (a6 * w1 + w2);
  Mat3 z1 = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * z1 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace detail

/// exp(t Y), accurate to ~1e-12 relative; det = 1 when trace(Y) = 0.
inline Mat3 mat_exp(const Mat3& y, double t = 1.0) {
  Mat3 a = t * y;
  double nrm = 0;
  for (int i = 0; i < 3; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) s += std::abs(a(i, j));
    nrm = std::max(nrm, s);
  }
  int squarings = 0;
  const double theta13 = 5.37;  // Higham's theta for Pade-13
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    a = std::ldexp(1.0, -squarings) * a;
  }
  Mat3 u, v;
  detail::pade13(a, u, v);
  Mat3 num = v + u;
  Mat3 den = v - u;
  Mat3 r = den.inverse() * num;
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

// ---------------------------------------------------------------------------
// Projective points and lines
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
T normalize_rep(const T& raw) {
  double n = raw.norm();
  if (n < 1e-300) throw std::invalid_argument("projective representative is zero");
  T u = (1.0 / n) * raw;
  // canonical sign: first component of non-negligible size is made positive
  for (int i = 0; i < 3; ++i) {
    if (std::abs(u[i]) > 1e-9) {
      if (u[i] < 0) u = -1.0 * u;
      break;
    }
  }
  return u;
}

}  // namespace detail

/// A point of RP^2, stored as a unit representative with a canonical sign rule.
struct ProjPoint {
  Vec3 rep;

  ProjPoint() : rep(1, 0, 0) {}
  explicit ProjPoint(const Vec3& raw) : rep(detail::normalize_rep(raw)) {}
};

/// A line of RP^2 (a point of the dual plane), same storage conventions.
struct ProjLine {
  Covec3 rep;

  ProjLine() : rep(1, 0, 0) {}
  explicit ProjLine(const Covec3& raw) : rep(detail::normalize_rep(raw)) {}
};

/// Distance up to sign between unit representatives (sine of the angle).
inline double proj_dist(const ProjPoint& a, const ProjPoint& b) {
  return cross_vv(a.rep, b.rep).norm();
}
inline double proj_dist(const ProjLine& a, const ProjLine& b) {
  return cross_cc(a.rep, b.rep).norm();
}

inline bool incident(const ProjPoint& q, const ProjLine& p, double tol = 1e-10) {
  return std::abs(p.rep * q.rep) < tol;
}

/// Line through two distinct points.
inline ProjLine join(const ProjPoint& a, const ProjPoint& b) {
  return ProjLine(cross_vv(a.rep, b.rep));
}
/// Intersection point of two distinct lines.
inline ProjPoint meet(const ProjLine& a, const ProjLine& b) {
  return ProjPoint(cross_cc(a.rep, b.rep));
}

/// Four distinct points on a common line.
struct Quadruple {
  std::array<ProjPoint, 4> pts;
  ProjLine line;

  Quadruple(const std::array<ProjPoint, 4>& points, const ProjLine& common)
      : pts(points), line(common) {
    for (const auto& q : pts)
      if (!incident(q, line, 1e-10)) throw std::invalid_argument("not collinear");
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (proj_dist(pts[i], pts[j]) < 1e-12) throw std::invalid_argument("degenerate quadruple");
  }

  /// Convenience: infer the common line from the first two points.
  static Quadruple on_common_line(const std::array<ProjPoint, 4>& points) {
    return Quadruple(points, join(points[0], points[1]));
  }
};

/// Cross-ratio via the k-lemma: write a3 = alpha3 a1 + beta3 a2 and
/// a4 = alpha4 a1 + beta4 a2 in homogeneous representatives; the value is
/// (alpha4 beta3)/(alpha3 beta4), which reduces to k for a3 = a1+a2,
/// a4 = k a1+a2. No affine chart is involved, so chart singularities
/// (points at infinity among the four) are harmless.
inline double cross_ratio(const Quadruple& qd) {
  const Vec3& a1 = qd.pts[0].rep;
  const Vec3& a2 = qd.pts[1].rep;
  // 2x2 solve in the plane spanned by a1, a2 (least squares via normal equations)
  auto solve2 = [&](const Vec3& b, double& al, double& be) {
    double g11 = a1[0] * a1[0] + a1[1] * a1[1] + a1[2] * a1[2];
    double g12 = a1[0] * a2[0] + a1[1] * a2[1] + a1[2] * a2[2];
    double g22 = a2[0] * a2[0] + a2[1] * a2[1] + a2[2] * a2[2];
    double r1 = a1[0] * b[0] + a1[1] * b[1] + a1[2] * b[2];
    double r2 = a2[0] * b[0] + a2[1] * b[1] + a2[2] * b[2];
    double det = g11 * g22 - g12 * g12;
    if (std::abs(det) < 1e-20) throw std::invalid_argument("degenerate quadruple");
    al = (g22 * r1 - g12 * r2) / det;
    be = (g11 * r2 - g12 * r1) / det;
  };
  double al3, be3, al4, be4;
  solve2(qd.pts[2].rep, al3, be3);
  solve2(qd.pts[3].rep, al4, be4);
  if (std::abs(al3) < 1e-13 || std::abs(be3) < 1e-13 || std::abs(al4) < 1e-13 ||
      std::abs(be4) < 1e-13)
    throw std::invalid_argument("degenerate quadruple");
  return (al4 * be3) / (al3 * be4);
}

}  // namespace dancing

#endif  // DANCING_LINALG_HPP
