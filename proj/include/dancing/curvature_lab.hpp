/*
 * Copyright (c) Contributors to the dancing-geometry project.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef DANCING_CURVATURE_LAB_HPP
#define DANCING_CURVATURE_LAB_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dancing/cartan_engel.hpp"
#include "dancing/dancing_metric.hpp"
#include "dancing/linalg.hpp"
#include "dancing/numeric.hpp"
#include "dancing/projective_curves.hpp"

// Numerical Levi-Civita / curvature pipeline for the dancing metric:
// curvature operator on 2-forms, Weyl +/- decomposition, Einstein and
// scalar-curvature checks, Petrov-type certification, the Hodge star for the
// para-complex orientation, group sections and null coframes, adapted lifts
// of null curves, and the round trip between quadric integral curves and
// null curves with parallel self-dual tangent plane.

namespace dancing {

// ---------------------------------------------------------------------------
// Group sections
// ---------------------------------------------------------------------------

/// g in SL3 with third column along qhat and third row of g^{-1} along phat
/// (then (g e3, e^3 g^{-1}) is the quadric lift of the pair). Completion rule:
/// take the two standard basis vectors most orthogonal to qhat, project them
/// onto ker phat along qhat (one Gauss step each), then scale the second
/// column to make det = 1. `frozen` pins the completion indices so that
/// finite differences across a stencil see one smooth formula.
inline Mat3 group_section(const Vec3& qhat, const Covec3& phat, const int* frozen = nullptr) {
  double pq = phat * qhat;
  if (std::abs(pq) < 1e-12 * (1 + phat.norm() * qhat.norm()))
    throw std::invalid_argument("group_section: incident pair");
  int i0 = 0, i1 = 1;
  if (frozen) {
    i0 = frozen[0];
    i1 = frozen[1];
  } else {
    // indices of the two smallest |qhat_k| (unit-normalized notionally)
    double a0 = std::abs(qhat[0]), a1 = std::abs(qhat[1]), a2 = std::abs(qhat[2]);
    if (a0 >= a1 && a0 >= a2) {
      i0 = 1;
      i1 = 2;
    } else if (a1 >= a0 && a1 >= a2) {
      i0 = 0;
      i1 = 2;
    } else {
      i0 = 0;
      i1 = 1;
    }
  }
  Vec3 c0 = basis_vec(i0) - ((phat * basis_vec(i0)) / pq) * qhat;
  Vec3 c1 = basis_vec(i1) - ((phat * basis_vec(i1)) / pq) * qhat;
  double d = det3(c0, c1, qhat);
  if (std::abs(d) < 1e-10) throw std::domain_error("group_section: degenerate completion");
  return Mat3::from_cols(c0, c1 / d, qhat);
}

inline Mat3 group_section(const M4Point& pt) { return group_section(pt.q.rep, pt.p.rep); }

// ---------------------------------------------------------------------------
// Null coframe by differentiating the section
// ---------------------------------------------------------------------------

/// Coframe data at a chart point: rows of `eta` are the components of
/// (eta^1, eta^2, eta_1, eta_2) in the chart basis (dx, dy, da, db).
struct Frame4 {
  ChartPoint base;
  std::array<std::array<double, 4>, 4> eta;
  double gram_defect;      // distance of the frame Gram matrix to the null form
  double orientation_det;  // eta^1 ^ eta^2 ^ eta_1 ^ eta_2 over dx^dy^da^db
};

namespace curvature_detail {

inline Mat3 section_at_chart(double x, double y, double a, double b, const int* frozen) {
  Vec3 q{x, y, 1};
  Covec3 p{a, -1, b};
  return group_section(q, p, frozen);
}

}  // namespace curvature_detail

inline Frame4 coframe(const ChartPoint& cp) {
  using curvature_detail::section_at_chart;
  // freeze the completion at the center so the section is one smooth formula
  Vec3 qh = cp.q_lift();
  int i0, i1;
  {
    double a0 = std::abs(qh[0]), a1 = std::abs(qh[1]), a2 = std::abs(qh[2]);
    if (a0 >= a1 && a0 >= a2) {
      i0 = 1;
      i1 = 2;
    } else if (a1 >= a0 && a1 >= a2) {
      i0 = 0;
      i1 = 2;
    } else {
      i0 = 0;
      i1 = 1;
    }
  }
  int frozen[2] = {i0, i1};
  double c[4] = {cp.x, cp.y, cp.a, cp.b};
  Mat3 g0 = section_at_chart(c[0], c[1], c[2], c[3], frozen);
  Mat3 g0inv = g0.inverse();
  const double h = 1e-5;
  std::array<Mat3, 4> omega;
  for (int mu = 0; mu < 4; ++mu) {
    auto eval = [&](double hh) {
      double cc[4] = {c[0], c[1], c[2], c[3]};
      cc[mu] += hh;
      return section_at_chart(cc[0], cc[1], cc[2], cc[3], frozen);
    };
    // Richardson-improved central difference of the section
    Mat3 d1 = (1.0 / (2 * h)) * (eval(h) - eval(-h));
    Mat3 d2 = (1.0 / h) * (eval(h / 2) - eval(-h / 2));
    Mat3 der = (1.0 / 3.0) * (4.0 * d2 - d1);
    omega[static_cast<std::size_t>(mu)] = g0inv * der;
  }
  Frame4 out{cp, {}, 0, 0};
  for (int mu = 0; mu < 4; ++mu) {
    const Mat3& w = omega[static_cast<std::size_t>(mu)];
    out.eta[0][static_cast<std::size_t>(mu)] = w(0, 2);  // eta^1 = omega^1_3
    out.eta[1][static_cast<std::size_t>(mu)] = w(1, 2);  // eta^2 = omega^2_3
    out.eta[2][static_cast<std::size_t>(mu)] = w(2, 0);  // eta_1 = omega^3_1
    out.eta[3][static_cast<std::size_t>(mu)] = w(2, 1);  // eta_2 = omega^3_2
  }
  // Gram defect against the chart metric: g = 2(eta_1 eta^1 + eta_2 eta^2)
  auto gm = metric_chart(cp);
  double worst = 0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      double s = out.eta[2][static_cast<std::size_t>(mu)] * out.eta[0][static_cast<std::size_t>(nu)] +
                 out.eta[2][static_cast<std::size_t>(nu)] * out.eta[0][static_cast<std::size_t>(mu)] +
                 out.eta[3][static_cast<std::size_t>(mu)] * out.eta[1][static_cast<std::size_t>(nu)] +
                 out.eta[3][static_cast<std::size_t>(nu)] * out.eta[1][static_cast<std::size_t>(mu)];
      worst = std::max(worst, std::abs(s - gm[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)]));
    }
  out.gram_defect = worst;
  Eigen::Matrix4d E;
  for (int r = 0; r < 4; ++r)
    for (int mu = 0; mu < 4; ++mu) E(r, mu) = out.eta[static_cast<std::size_t>(r)][static_cast<std::size_t>(mu)];
  out.orientation_det = E.determinant();
  return out;
}

// ---------------------------------------------------------------------------
// Chart metric helpers and the Hodge star
// ---------------------------------------------------------------------------

namespace curvature_detail {

using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

inline Mat4 chart_metric(double x, double y, double a, double b) {
  auto g = metric_chart(ChartPoint(x, y, a, b));
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

// index pairs for the Lambda^2 basis dx^mu ^ dx^nu, mu < nu
constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

inline int pair_index(int mu, int nu) {
  for (int k = 0; k < 6; ++k)
    if (kPairs[k][0] == mu && kPairs[k][1] == nu) return k;
  throw std::logic_error("pair_index");
}

/// wedge pairing: (dx^I ^ dx^J) = W_IJ dx^0123
inline Mat6 wedge_matrix() {
  Mat6 w = Mat6::Zero();
  auto eps4 = [](int a, int b, int c, int d) {
    int p[4] = {a, b, c, d};
    int sign = 1;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        if (p[i] == p[j]) return 0;
        if (p[i] > p[j]) sign = -sign;
      }
    return sign;
  };
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      w(i, j) = eps4(kPairs[i][0], kPairs[i][1], kPairs[j][0], kPairs[j][1]);
  return w;
}

/// induced metric on Lambda^2: <dx^I, dx^J> = G^(mu rho) G^(nu sigma) - G^(mu sigma) G^(nu rho)
inline Mat6 lambda2_gram(const Mat4& ginv) {
  Mat6 q;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      int m = kPairs[i][0], n = kPairs[i][1], r = kPairs[j][0], s = kPairs[j][1];
      q(i, j) = ginv(m, r) * ginv(n, s) - ginv(m, s) * ginv(n, r);
    }
  return q;
}

/// index-lowering map from bivectors v ^ w to 2-forms (same combinatorial
/// Gram formula built from the metric itself)
inline Mat6 lambda2_lower(const Mat4& g) { return lambda2_gram(g); }

}  // namespace curvature_detail

/// Orientation of the pair space against the constant chart frame
/// (dx, dy, da, db). A para-complex basis rule alone does not pin the
/// orientation (bases (v1, v2, Kv1, Kv2) with K^2 = +1 fall into two
/// determinant classes), so the orientation is fixed by requiring every
/// group-section null coframe to be positively oriented. In the chart that
/// sign is sign(ax - y + b) = sign of the pairing of the fixed lifts;
/// verified against the coframes in the unit tests.
inline double orientation_sign(const ChartPoint& cp) {
  return (cp.a * cp.x - cp.y + cp.b) > 0 ? 1.0 : -1.0;
}

/// A 4-metric as a coordinate field, with its orientation sign relative to
/// the coordinate frame (a function of the point in general).
struct Metric4 {
  std::function<curvature_detail::Mat4(const std::array<double, 4>&)> g;
  std::function<double(const std::array<double, 4>&)> orient = [](const std::array<double, 4>&) {
    return 1.0;
  };
};

/// The dancing metric in the standard chart.
inline Metric4 dancing_metric4() {
  Metric4 m;
  m.g = [](const std::array<double, 4>& c) {
    return curvature_detail::chart_metric(c[0], c[1], c[2], c[3]);
  };
  m.orient = [](const std::array<double, 4>& c) {
    return (c[2] * c[0] - c[1] + c[3]) > 0 ? 1.0 : -1.0;
  };
  return m;
}

/// Hodge star on Lambda^2 (exact metric data at the point; no FD).
inline curvature_detail::Mat6 hodge_star_at(const Metric4& m, const std::array<double, 4>& c) {
  using namespace curvature_detail;
  Mat4 g = m.g(c);
  Mat4 ginv = g.inverse();
  double det = g.determinant();
  double omega = m.orient(c) * std::sqrt(std::abs(det));
  return omega * wedge_matrix() * lambda2_gram(ginv);
}

inline curvature_detail::Mat6 hodge_star(const ChartPoint& cp) {
  return hodge_star_at(dancing_metric4(), {cp.x, cp.y, cp.a, cp.b});
}

// ---------------------------------------------------------------------------
// Curvature report
// ---------------------------------------------------------------------------

struct CurvatureReport {
  double scalar = 0;
  double ricci0_norm = 0;
  double weyl_minus_norm = 0;
  double weyl_plus_norm = 0;
  std::array<double, 3> weyl_plus_eigs{};  // sorted ascending
  std::string petrov;
  // each principal plane as two chart tangent 4-vectors
  std::array<std::array<double, 4>, 2> principal_plane_1{};
  std::array<std::array<double, 4>, 2> principal_plane_2{};
  double star_involution_defect = 0;
  double self_adjoint_defect = 0;
  double nabla_g_defect = 0;
};

namespace curvature_detail {

struct MetricDerivs {
  Mat4 g, ginv;
  double dg[4][4][4];    // dg[mu][a][b]
  double d2g[4][4][4][4];  // d2g[mu][nu][a][b]
};

inline MetricDerivs metric_derivs(const std::function<Mat4(const std::array<double, 4>&)>& gfn,
                                  const std::array<double, 4>& c, double h = 5e-4) {
  MetricDerivs md;
  auto G = [&](double d0, double d1, double d2, double d3) {
    return gfn({c[0] + d0, c[1] + d1, c[2] + d2, c[3] + d3});
  };
  md.g = G(0, 0, 0, 0);
  md.ginv = md.g.inverse();
  auto shift = [&](int mu, double hh) {
    double d[4] = {0, 0, 0, 0};
    d[mu] = hh;
    return G(d[0], d[1], d[2], d[3]);
  };
  for (int mu = 0; mu < 4; ++mu) {
    Mat4 c1 = (shift(mu, h) - shift(mu, -h)) / (2 * h);
    Mat4 c2 = (shift(mu, h / 2) - shift(mu, -h / 2)) / h;
    Mat4 der = (4.0 * c2 - c1) / 3.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) md.dg[mu][a][b] = der(a, b);
  }
  auto shift2 = [&](int mu, int nu, double hmu, double hnu) {
    double d[4] = {0, 0, 0, 0};
    d[mu] += hmu;
    d[nu] += hnu;
    return G(d[0], d[1], d[2], d[3]);
  };
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu; nu < 4; ++nu) {
      Mat4 der;
      if (mu == nu) {
        auto second = [&](double hh) { return (shift(mu, hh) - 2.0 * md.g + shift(mu, -hh)) / (hh * hh); };
        der = (4.0 * second(h / 2) - second(h)) / 3.0;
      } else {
        auto cross = [&](double hh) {
          return (shift2(mu, nu, hh, hh) - shift2(mu, nu, hh, -hh) - shift2(mu, nu, -hh, hh) +
                  shift2(mu, nu, -hh, -hh)) /
                 (4 * hh * hh);
        };
        der = (4.0 * cross(h / 2) - cross(h)) / 3.0;
      }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          md.d2g[mu][nu][a][b] = der(a, b);
          md.d2g[nu][mu][a][b] = der(a, b);
        }
    }
  return md;
}

struct CurvatureTensors {
  double gamma[4][4][4];    // Gamma^r_{m n}
  double dgamma[4][4][4][4];  // d_l Gamma^r_{m n}
  double riemann[4][4][4][4]; // R_{r s m n} (all lower)
  Mat4 ricci;
  double scalar;
};

inline CurvatureTensors curvature_tensors(const MetricDerivs& md) {
  CurvatureTensors ct{};
  for (int r = 0; r < 4; ++r)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        double s = 0;
        for (int k = 0; k < 4; ++k)
          s += md.ginv(r, k) * (md.dg[m][k][n] + md.dg[n][k][m] - md.dg[k][m][n]);
        ct.gamma[r][m][n] = 0.5 * s;
      }
  // d_l Gamma: differentiate the closed form using dg and d2g
  double dginv[4][4][4];
  for (int l = 0; l < 4; ++l) {
    // d ginv = -ginv dg ginv
    Mat4 dgm;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) dgm(a, b) = md.dg[l][a][b];
    Mat4 der = -md.ginv * dgm * md.ginv;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) dginv[l][a][b] = der(a, b);
  }
  for (int l = 0; l < 4; ++l)
    for (int r = 0; r < 4; ++r)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          double s = 0;
          for (int k = 0; k < 4; ++k) {
            s += dginv[l][r][k] * (md.dg[m][k][n] + md.dg[n][k][m] - md.dg[k][m][n]);
            s += md.ginv(r, k) * (md.d2g[l][m][k][n] + md.d2g[l][n][k][m] - md.d2g[l][k][m][n]);
          }
          ct.dgamma[l][r][m][n] = 0.5 * s;
        }
  // R^r_{s m n} = d_m Gamma^r_{n s} - d_n Gamma^r_{m s} + Gamma^r_{m k} Gamma^k_{n s} - Gamma^r_{n k} Gamma^k_{m s}
  double rupper[4][4][4][4];
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          double v = ct.dgamma[m][r][n][s] - ct.dgamma[n][r][m][s];
          for (int k = 0; k < 4; ++k)
            v += ct.gamma[r][m][k] * ct.gamma[k][n][s] - ct.gamma[r][n][k] * ct.gamma[k][m][s];
          rupper[r][s][m][n] = v;
        }
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          double v = 0;
          for (int k = 0; k < 4; ++k) v += md.g(r, k) * rupper[k][s][m][n];
          ct.riemann[r][s][m][n] = v;
        }
  for (int s = 0; s < 4; ++s)
    for (int n = 0; n < 4; ++n) {
      double v = 0;
      for (int m = 0; m < 4; ++m) v += rupper[m][s][m][n];
      ct.ricci(s, n) = v;
    }
  ct.scalar = 0;
  for (int s = 0; s < 4; ++s)
    for (int n = 0; n < 4; ++n) ct.scalar += md.ginv(s, n) * ct.ricci(s, n);
  return ct;
}

}  // namespace curvature_detail

/// Christoffel symbols at a chart point (exposed for the covariant-constancy
/// and transport checks).
inline std::array<std::array<std::array<double, 4>, 4>, 4> christoffel(const ChartPoint& cp) {
  using namespace curvature_detail;
  MetricDerivs md = metric_derivs(dancing_metric4().g, {cp.x, cp.y, cp.a, cp.b});
  CurvatureTensors ct = curvature_tensors(md);
  std::array<std::array<std::array<double, 4>, 4>, 4> out{};
  for (int r = 0; r < 4; ++r)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) out[r][m][n] = ct.gamma[r][m][n];
  return out;
}

inline CurvatureReport curvature_report_at(const Metric4& metric, const std::array<double, 4>& c) {
  using namespace curvature_detail;
  MetricDerivs md = metric_derivs(metric.g, c);
  CurvatureTensors ct = curvature_tensors(md);

  CurvatureReport rep;
  rep.scalar = ct.scalar;

  // traceless Ricci (mixed indices for a scale-free norm)
  Mat4 ric0 = ct.ricci - 0.25 * ct.scalar * md.g;
  rep.ricci0_norm = (md.ginv * ric0).norm();

  // curvature operator on Lambda^2 in the dx^I basis:
  // (R beta)_I = sum_J R_I^J beta_J with R_I^J = R_{I rho sigma} ginv ginv
  Mat6 rop;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      int m = kPairs[i][0], n = kPairs[i][1];
      int r = kPairs[j][0], s = kPairs[j][1];
      double v = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          v += ct.riemann[m][n][a][b] * md.ginv(a, r) * md.ginv(b, s);
      rop(i, j) = v;
    }

  Mat6 star = hodge_star_at(metric, c);
  rep.star_involution_defect = (star * star - Mat6::Identity()).norm();

  Mat6 gram2 = lambda2_gram(md.ginv);
  // self-adjointness with respect to the (indefinite) Lambda^2 metric
  Mat6 adj = gram2.inverse() * rop.transpose() * gram2;
  rep.self_adjoint_defect = (rop - adj).norm() / (1 + rop.norm());

  // split bases
  Eigen::Matrix<double, 6, 6> pp = 0.5 * (Mat6::Identity() + star);
  Eigen::Matrix<double, 6, 6> pm = 0.5 * (Mat6::Identity() - star);
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 6, 6>> qrp(pp);
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 6, 6>> qrm(pm);
  Eigen::Matrix<double, 6, 6> qp = qrp.householderQ();
  Eigen::Matrix<double, 6, 6> qm = qrm.householderQ();
  Eigen::Matrix<double, 6, 3> bp = qp.leftCols<3>();
  Eigen::Matrix<double, 6, 3> bm = qm.leftCols<3>();
  Mat6 basis;
  basis << bp, bm;
  Mat6 t = basis.inverse() * rop * basis;
  Eigen::Matrix3d aplus = t.block<3, 3>(0, 0);
  Eigen::Matrix3d aminus = t.block<3, 3>(3, 3);
  Eigen::Matrix3d wplus = aplus - (aplus.trace() / 3.0) * Eigen::Matrix3d::Identity();
  Eigen::Matrix3d wminus = aminus - (aminus.trace() / 3.0) * Eigen::Matrix3d::Identity();
  rep.weyl_plus_norm = wplus.norm();
  rep.weyl_minus_norm = wminus.norm();

  Eigen::EigenSolver<Eigen::Matrix3d> es(wplus);
  std::array<double, 3> eigs{};
  double max_imag = 0;
  for (int k = 0; k < 3; ++k) {
    eigs[static_cast<std::size_t>(k)] = es.eigenvalues()(k).real();
    max_imag = std::max(max_imag, std::abs(es.eigenvalues()(k).imag()));
  }
  std::sort(eigs.begin(), eigs.end());
  rep.weyl_plus_eigs = eigs;

  // Petrov label from the eigenvalue pattern of W+
  double scale = std::max({std::abs(eigs[0]), std::abs(eigs[2]), 1e-300});
  double tol = 1e-3 * scale;
  if (rep.weyl_plus_norm < 1e-10 * (1 + std::abs(rep.scalar))) {
    rep.petrov = "O";
  } else if (max_imag > tol) {
    rep.petrov = "I(complex)";
  } else {
    bool d01 = std::abs(eigs[0] - eigs[1]) < tol;
    bool d12 = std::abs(eigs[1] - eigs[2]) < tol;
    if (d01 && d12)
      rep.petrov = eigs[1] < tol ? "N" : "O";
    else if (d01 || d12)
      rep.petrov = "D";
    else
      rep.petrov = "I";
  }

  // principal planes: intersect the repeated eigenspace of W+ with the
  // decomposability quadric beta ^ beta = 0
  if (rep.petrov == "D") {
    double lam_rep = std::abs(eigs[0] - eigs[1]) < tol ? eigs[0] : eigs[1];
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(wplus - lam_rep * Eigen::Matrix3d::Identity(),
                                          Eigen::ComputeFullV);
    // two least singular directions span the eigenspace
    Vec6 beta1 = bp * svd.matrixV().col(2);
    Vec6 beta2 = bp * svd.matrixV().col(1);
    Mat6 w = wedge_matrix();
    double c20 = beta1.dot(w * beta1);
    double c11 = beta1.dot(w * beta2);
    double c02 = beta2.dot(w * beta2);
    // roots of c20 x^2 + 2 c11 x y + c02 y^2 = 0 in [x : y]
    double disc = c11 * c11 - c20 * c02;
    if (disc >= 0) {
      double sq = std::sqrt(disc);
      auto plane_of = [&](double xx, double yy) {
        Vec6 beta = xx * beta1 + yy * beta2;
        // kernel of contraction: v^mu beta_{mu nu} = 0
        Mat4 bm4 = Mat4::Zero();
        for (int k = 0; k < 6; ++k) {
          bm4(kPairs[k][0], kPairs[k][1]) = beta(k);
          bm4(kPairs[k][1], kPairs[k][0]) = -beta(k);
        }
        Eigen::JacobiSVD<Mat4> s4(bm4, Eigen::ComputeFullV);
        std::array<std::array<double, 4>, 2> plane{};
        for (int c2 = 0; c2 < 2; ++c2)
          for (int r2 = 0; r2 < 4; ++r2)
            plane[static_cast<std::size_t>(c2)][static_cast<std::size_t>(r2)] = s4.matrixV()(r2, 2 + c2);
        return plane;
      };
      if (std::abs(c20) > 1e-12 * (std::abs(c11) + std::abs(c02))) {
        rep.principal_plane_1 = plane_of(-c11 + sq, c20);
        rep.principal_plane_2 = plane_of(-c11 - sq, c20);
      } else {
        rep.principal_plane_1 = plane_of(1.0, 0.0);
        rep.principal_plane_2 = plane_of(-c02, 2 * c11);
      }
    }
  }

  // covariant constancy of the metric: nabla_l g_{ab} computed from dg and Gamma
  double worst = 0;
  for (int l = 0; l < 4; ++l)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double v = md.dg[l][a][b];
        for (int k = 0; k < 4; ++k)
          v -= ct.gamma[k][l][a] * md.g(k, b) + ct.gamma[k][l][b] * md.g(a, k);
        worst = std::max(worst, std::abs(v));
      }
  rep.nabla_g_defect = worst;
  return rep;
}

inline CurvatureReport curvature_report(const ChartPoint& cp) {
  return curvature_report_at(dancing_metric4(), {cp.x, cp.y, cp.a, cp.b});
}

// ---------------------------------------------------------------------------
// SD/ASD classification of 2-planes
// ---------------------------------------------------------------------------

enum class PlaneType { SD, ASD, NotNull };

/// chart components (dx, dy, da, db) of a homogeneous tangent
inline std::array<double, 4> chart_components(const M4Tangent& u) {
  double q3 = u.qhat[2];
  double p2 = u.phat[1];
  if (std::abs(q3) < 1e-12 || std::abs(p2) < 1e-12)
    throw std::invalid_argument("chart_components: point not in the affine chart");
  double dx = u.dq[0] / q3 - u.qhat[0] * u.dq[2] / (q3 * q3);
  double dy = u.dq[1] / q3 - u.qhat[1] * u.dq[2] / (q3 * q3);
  // a = -p1/p2, b = -p3/p2
  double da = -u.dp[0] / p2 + u.phat[0] * u.dp[1] / (p2 * p2);
  double db = -u.dp[2] / p2 + u.phat[2] * u.dp[1] / (p2 * p2);
  return {dx, dy, da, db};
}

inline ChartPoint chart_point_of(const M4Tangent& u) {
  double q3 = u.qhat[2];
  double p2 = u.phat[1];
  return ChartPoint(u.qhat[0] / q3, u.qhat[1] / q3, -u.phat[0] / p2, -u.phat[2] / p2);
}

inline PlaneType sd_classify(const M4Tangent& v1, const M4Tangent& v2) {
  using namespace curvature_detail;
  ChartPoint cp = chart_point_of(v1);
  auto a = chart_components(v1);
  auto b = chart_components(v2);
  Mat4 g = chart_metric(cp.x, cp.y, cp.a, cp.b);
  Eigen::Vector4d va(a[0], a[1], a[2], a[3]), vb(b[0], b[1], b[2], b[3]);
  double na = va.norm(), nb = vb.norm();
  if (na < 1e-12 || nb < 1e-12) throw std::invalid_argument("sd_classify: dependent tangents");
  // bivector of the plane; its norm measures independence
  Vec6 biv;
  for (int k = 0; k < 6; ++k)
    biv(k) = va(kPairs[k][0]) * vb(kPairs[k][1]) - va(kPairs[k][1]) * vb(kPairs[k][0]);
  if (biv.norm() < 1e-10 * na * nb) throw std::invalid_argument("sd_classify: dependent tangents");
  double scale = std::max({std::abs(va.dot(g * va)) / (na * na), std::abs(vb.dot(g * vb)) / (nb * nb),
                           std::abs(va.dot(g * vb)) / (na * nb)});
  if (scale > 1e-8) return PlaneType::NotNull;
  // lower to the plane's 2-form (for a null plane this is proportional to
  // the annihilator wedge), then test the star eigenvalue
  Vec6 beta = lambda2_lower(g) * biv;
  Vec6 sb = hodge_star(cp) * beta;
  double dplus = (sb - beta).norm(), dminus = (sb + beta).norm();
  return dplus < dminus ? PlaneType::SD : PlaneType::ASD;
}

/// beta ^ (W+ beta) = 0 test (for SD planes): principal iff ~0.
inline double principal_defect(const ChartPoint& cp, const M4Tangent& v1, const M4Tangent& v2) {
  using namespace curvature_detail;
  MetricDerivs md = metric_derivs(dancing_metric4().g, {cp.x, cp.y, cp.a, cp.b});
  CurvatureTensors ct = curvature_tensors(md);
  Mat6 rop;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      int m = kPairs[i][0], n = kPairs[i][1], r = kPairs[j][0], s = kPairs[j][1];
      double v = 0;
      for (int aa = 0; aa < 4; ++aa)
        for (int bb = 0; bb < 4; ++bb) v += ct.riemann[m][n][aa][bb] * md.ginv(aa, r) * md.ginv(bb, s);
      rop(i, j) = v;
    }
  Mat6 star = hodge_star(cp);
  Mat6 pp = 0.5 * (Mat6::Identity() + star);
  // Weyl projected to the SD block, acting on Lambda^2
  double quarter = 0;
  for (int i = 0; i < 6; ++i) quarter += rop(i, i);
  Mat6 wop = pp * (rop - (quarter / 6.0) * Mat6::Identity()) * pp;
  auto a = chart_components(v1);
  auto b = chart_components(v2);
  Eigen::Vector4d va(a[0], a[1], a[2], a[3]), vb(b[0], b[1], b[2], b[3]);
  Vec6 biv;
  for (int k = 0; k < 6; ++k)
    biv(k) = va(kPairs[k][0]) * vb(kPairs[k][1]) - va(kPairs[k][1]) * vb(kPairs[k][0]);
  Vec6 beta = lambda2_lower(md.g) * biv;
  beta.normalize();
  Vec6 wbeta = wop * beta;
  double pairing = beta.dot(wedge_matrix() * wbeta);
  return std::abs(pairing) / (1 + wbeta.norm());
}

// ---------------------------------------------------------------------------
// Null curves and adapted lifts
// ---------------------------------------------------------------------------

/// A parametrized curve in the pair space with non-degenerate null velocity,
/// carried with representative jets to order 3.
struct NullCurve {
  SolutionJets jets;
  double nullity = 0;     // worst normalized metric value of the velocity
  double regularity = 0;  // smallest normalized projective speed

  NullCurve(const SolutionJets& j, int n_check = 40) : jets(j) {
    double worst = 0, slowest = 1e300;
    for (int i = 0; i <= n_check; ++i) {
      double t = j.t0 + (j.t1 - j.t0) * i / n_check;
      std::array<Vec3, 4> q = j.q_jets(t);
      std::array<Covec3, 4> p = j.p_jets(t);
      M4Tangent v{q[0], p[0] / (p[0] * q[0]), q[1], p[1] / (p[0] * q[0])};
      double g = metric_norm2(v);
      double qspeed = cross_vv(q[0], q[1]).norm() / (q[0].norm() * q[0].norm());
      double pspeed = cross_cc(p[0], p[1]).norm() / (p[0].norm() * p[0].norm());
      worst = std::max(worst, std::abs(g) / (1 + qspeed * pspeed));
      slowest = std::min(slowest, std::min(qspeed, pspeed));
    }
    nullity = worst;
    regularity = slowest;
    if (nullity > 1e-9 * 1e3) throw std::invalid_argument("NullCurve: velocity is not null");
    if (regularity < 1e-8) throw std::invalid_argument("NullCurve: degenerate projection");
  }
};

/// The adapted lift: a smooth SL3-valued path over the curve whose
/// Maurer-Cartan pull-back has the normalized pattern; phi measures the
/// failure of the self-dual tangent plane to be parallel.
struct AdaptedLift {
  std::function<Mat3(double)> sigma;          // adapted section
  std::function<Mat3(double)> omega;          // sigma^{-1} sigma'
  std::function<double(double)> phi;          // -omega(2,2) = omega^1_1 + omega^2_2
  double pattern_defect = 0;                  // worst |(s^1, s^2, s_1, s_2) - (0,1,1,0)|
  double t0 = 0, t1 = 0;
};

namespace curvature_detail {

struct SectionJets {
  Mat3 sigma, dsigma, d2sigma, d3sigma;
};

/// smooth section over the curve built from the curve jets:
/// columns (c1, c2/d, qhat) with c1 the ker-phat projection of qhat' and
/// c2 = phat x c1 (componentwise flip), d the determinant.
inline SectionJets section_jets(const std::array<Vec3, 4>& q, const std::array<Covec3, 4>& p) {
  using J = Jet<3>;
  using JV = JetVec3<3>;
  JV qj = JV::from({q[0], q[1], q[2], q[3]});
  JV pj;  // componentwise covector jets
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 4; ++k) pj.c[i].d[k] = p[static_cast<std::size_t>(k)][i];

  auto dotj = [](const JV& a, const JV& b) { return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2]; };
  JV dq = qj.shift();
  J alpha = dotj(pj, dq) / dotj(pj, qj);
  JV c1;
  for (int i = 0; i < 3; ++i) c1.c[i] = dq.c[i] - alpha * qj.c[i];
  // c2 = cross of the covector with c1 flipped to a covector slotwise
  JV c2;
  c2.c[0] = pj.c[1] * c1.c[2] - pj.c[2] * c1.c[1];
  c2.c[1] = pj.c[2] * c1.c[0] - pj.c[0] * c1.c[2];
  c2.c[2] = pj.c[0] * c1.c[1] - pj.c[1] * c1.c[0];
  J d = curve_detail::jet_det3(c1, c2, qj);
  if (std::abs(d.d[0]) < 1e-12) throw std::domain_error("adapted_lift: section degenerate");
  J dinv = d.inv();
  JV c2n;
  for (int i = 0; i < 3; ++i) c2n.c[i] = c2.c[i] * dinv;
  SectionJets out;
  auto fill = [&](int order, Mat3& m) {
    for (int i = 0; i < 3; ++i) {
      m(i, 0) = c1.c[i].d[order];
      m(i, 1) = c2n.c[i].d[order];
      m(i, 2) = qj.c[i].d[order];
    }
  };
  fill(0, out.sigma);
  fill(1, out.dsigma);
  fill(2, out.d2sigma);
  fill(3, out.d3sigma);
  return out;
}

struct OmegaJets {
  Mat3 omega, domega;
  Mat3 sigma;
};

inline OmegaJets omega_jets(const std::array<Vec3, 4>& q, const std::array<Covec3, 4>& p) {
  SectionJets sj = section_jets(q, p);
  Mat3 sinv = sj.sigma.inverse();
  Mat3 om = sinv * sj.dsigma;
  Mat3 dom = sinv * sj.d2sigma - om * om;
  return {om, dom, sj.sigma};
}

}  // namespace curvature_detail

inline AdaptedLift adapted_lift(const NullCurve& curve) {
  auto qj = curve.jets.q_jets;
  auto pj = curve.jets.p_jets;

  struct Gauge {
    Mat3 sigma_bar, omega_bar;
  };
  auto at = [qj, pj](double t) -> Gauge {
    using namespace curvature_detail;
    std::array<Vec3, 4> q = qj(t);
    std::array<Covec3, 4> p = pj(t);
    OmegaJets oj = omega_jets(q, p);
    double s1u = oj.omega(0, 2), s2u = oj.omega(1, 2);   // s^1, s^2
    double s1d = oj.omega(2, 0), s2d = oj.omega(2, 1);   // s_1, s_2
    double up = std::hypot(s1u, s2u), dn = std::hypot(s1d, s2d);
    double sc = 1 + oj.omega.max_abs();
    if (up < 1e-10 * sc || dn < 1e-10 * sc)
      throw std::domain_error("adapted_lift: not non-degenerate");
    if (std::abs(s1d * s1u + s2d * s2u) > 1e-7 * sc * sc)
      throw std::domain_error("adapted_lift: nullity equation unsolvable");
    // M columns: col2 = (s^1, s^2); col1 = minimal-norm solution of (s_1, s_2) m = 1
    double nn = s1d * s1d + s2d * s2d;
    double m0 = s1d / nn, m1 = s2d / nn;
    double detM = m0 * s2u - m1 * s1u;
    // derivative of the gauge data
    double ds1u = oj.domega(0, 2), ds2u = oj.domega(1, 2);
    double ds1d = oj.domega(2, 0), ds2d = oj.domega(2, 1);
    double dnn = 2 * (s1d * ds1d + s2d * ds2d);
    double dm0 = ds1d / nn - s1d * dnn / (nn * nn);
    double dm1 = ds2d / nn - s2d * dnn / (nn * nn);
    double ddetM = dm0 * s2u + m0 * ds2u - dm1 * s1u - m1 * ds1u;
    double a = cbrt_real(detM);
    double da = ddetM / (3 * a * a);
    // A = M / a
    Eigen::Matrix2d M, dM;
    M << m0, s1u, m1, s2u;
    dM << dm0, ds1u, dm1, ds2u;
    Eigen::Matrix2d A = M / a;
    Eigen::Matrix2d dA = dM / a - (da / (a * a)) * M;
    Mat3 h, dh;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        h(i, j) = A(i, j);
        dh(i, j) = dA(i, j);
      }
    h(2, 2) = 1.0 / a;
    dh(2, 2) = -da / (a * a);
    Mat3 hinv = h.inverse();
    Gauge g;
    g.sigma_bar = oj.sigma * h;
    g.omega_bar = hinv * oj.omega * h + hinv * dh;
    return g;
  };

  AdaptedLift lift;
  lift.t0 = curve.jets.t0;
  lift.t1 = curve.jets.t1;
  lift.sigma = [at](double t) { return at(t).sigma_bar; };
  lift.omega = [at](double t) { return at(t).omega_bar; };
  lift.phi = [at](double t) { return -at(t).omega_bar(2, 2); };
  double worst = 0;
  for (int i = 0; i <= 40; ++i) {
    double t = lift.t0 + (lift.t1 - lift.t0) * i / 40.0;
    Mat3 om = lift.omega(t);
    worst = std::max({worst, std::abs(om(0, 2)), std::abs(om(1, 2) - 1.0), std::abs(om(2, 0) - 1.0),
                      std::abs(om(2, 1))});
  }
  lift.pattern_defect = worst;
  return lift;
}

/// sup |sigma* phi| along the curve: identically ~0 exactly when the SD
/// tangent plane is parallel (the half-geodesic condition).
inline double parallel_sd_residual(const NullCurve& curve, int n_samples = 80) {
  AdaptedLift lift = adapted_lift(curve);
  double worst = 0;
  for (int i = 0; i <= n_samples; ++i) {
    double t = lift.t0 + (lift.t1 - lift.t0) * i / n_samples;
    worst = std::max(worst, std::abs(lift.phi(t)));
  }
  return worst;
}

/// The unique quadric lift (E3, E^3) of a half-geodesic null curve; samples
/// are emitted on a uniform grid together with the pointwise integral-curve
/// defect computed from the adapted Maurer-Cartan form.
struct Q5Lift {
  std::vector<double> ts;
  std::vector<Vec3> qs;
  std::vector<Covec3> ps;
  double integral_defect = 0;  // max |p' - q x q'| (exact, via omega)
  double phi_sup = 0;
};

inline Q5Lift lift_to_q5(const NullCurve& curve, int n_samples = 400, double tol = 1e-6) {
  AdaptedLift lift = adapted_lift(curve);
  Q5Lift out;
  double worst_phi = 0, worst_def = 0;
  for (int i = 0; i <= n_samples; ++i) {
    double t = lift.t0 + (lift.t1 - lift.t0) * i / n_samples;
    Mat3 s = lift.sigma(t);
    Mat3 om = lift.omega(t);
    Mat3 sinv = s.inverse();
    Vec3 q = s.col(2);
    Covec3 p = sinv.row(2);
    out.ts.push_back(t);
    out.qs.push_back(q);
    out.ps.push_back(p);
    worst_phi = std::max(worst_phi, std::abs(lift.phi(t)));
    // exact derivatives through the Maurer-Cartan form
    Vec3 dq = (s * om).col(2);
    Covec3 dp = -1.0 * ((om * sinv).row(2));
    Covec3 defect = dp - cross_vv(q, dq);
    worst_def = std::max(worst_def, defect.norm() / (1 + dq.norm() + dp.norm()));
  }
  out.phi_sup = worst_phi;
  out.integral_defect = worst_def;
  if (worst_phi > tol) throw std::domain_error("lift_to_q5: not half-geodesic");
  return out;
}

/// Solution jets by 7-point stencils from dense uniform lift samples.
inline SolutionJets solution_jets_from_samples(const std::vector<double>& ts,
                                               const std::vector<Vec3>& qs,
                                               const std::vector<Covec3>& ps) {
  if (ts.size() < 9) throw std::invalid_argument("solution_jets_from_samples: too few samples");
  double h = ts[1] - ts[0];
  SolutionJets out;
  out.t0 = ts[3];
  out.t1 = ts[ts.size() - 4];
  auto qcopy = qs;
  auto pcopy = ps;
  auto tcopy = ts;
  out.q_jets = [qcopy, tcopy, h](double t) {
    // snap to the nearest interior node
    double pos = (t - tcopy.front()) / h;
    auto i = static_cast<std::size_t>(clamp(std::round(pos), 3.0, static_cast<double>(tcopy.size()) - 4.0));
    std::array<Vec3, 4> j;
    std::vector<double> comp(tcopy.size());
    for (int c = 0; c < 3; ++c) {
      for (std::size_t k = 0; k < qcopy.size(); ++k) comp[k] = qcopy[k][c];
      StencilDerivs d = stencil7(comp, i, h);
      j[0][c] = comp[i];
      j[1][c] = d.d1;
      j[2][c] = d.d2;
      j[3][c] = d.d3;
    }
    return j;
  };
  out.p_jets = [pcopy, tcopy, h](double t) {
    double pos = (t - tcopy.front()) / h;
    auto i = static_cast<std::size_t>(clamp(std::round(pos), 3.0, static_cast<double>(tcopy.size()) - 4.0));
    std::array<Covec3, 4> j;
    std::vector<double> comp(tcopy.size());
    for (int c = 0; c < 3; ++c) {
      for (std::size_t k = 0; k < pcopy.size(); ++k) comp[k] = pcopy[k][c];
      StencilDerivs d = stencil7(comp, i, h);
      j[0][c] = comp[i];
      j[1][c] = d.d1;
      j[2][c] = d.d2;
      j[3][c] = d.d3;
    }
    return j;
  };
  return out;
}

/// Normalize solution jets to unit-length representatives (forgetting the
/// quadric lift; used to state the round-trip problem honestly).
inline SolutionJets project_to_m4(const SolutionJets& sol) {
  SolutionJets out;
  out.t0 = sol.t0;
  out.t1 = sol.t1;
  auto qj = sol.q_jets;
  auto pj = sol.p_jets;
  out.q_jets = [qj](double t) {
    std::array<Vec3, 4> q = qj(t);
    JetVec3<3> v = JetVec3<3>::from({q[0], q[1], q[2], q[3]});
    Jet<3> n2 = v.c[0] * v.c[0] + v.c[1] * v.c[1] + v.c[2] * v.c[2];
    // inverse square root by Newton on jets
    Jet<3> s(1.0 / std::sqrt(n2.d[0]));
    for (int it = 0; it < 4; ++it) s = 0.5 * (s * (Jet<3>(3.0) - n2 * s * s));
    JetVec3<3> u;
    for (int i = 0; i < 3; ++i) u.c[i] = v.c[i] * s;
    return std::array<Vec3, 4>{u.at(0), u.at(1), u.at(2), u.at(3)};
  };
  out.p_jets = [pj](double t) {
    std::array<Covec3, 4> p = pj(t);
    JetVec3<3> v;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 4; ++k) v.c[i].d[k] = p[static_cast<std::size_t>(k)][i];
    Jet<3> n2 = v.c[0] * v.c[0] + v.c[1] * v.c[1] + v.c[2] * v.c[2];
    Jet<3> s(1.0 / std::sqrt(n2.d[0]));
    for (int it = 0; it < 4; ++it) s = 0.5 * (s * (Jet<3>(3.0) - n2 * s * s));
    std::array<Covec3, 4> outp;
    for (int k = 0; k < 4; ++k) {
      Jet<3> comp[3];
      for (int i = 0; i < 3; ++i) comp[i] = v.c[i] * s;
      outp[static_cast<std::size_t>(k)] = Covec3{comp[0].d[k], comp[1].d[k], comp[2].d[k]};
    }
    return outp;
  };
  return out;
}

}  // namespace dancing

#endif  // DANCING_CURVATURE_LAB_HPP
