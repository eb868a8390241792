#pragma once

// Subspaces of R^n with orthonormal frames and their hermitian invariants:
// Kaehler angles, the complex determinant invariant Theta, calibration values
// of structure forms, induced complex structures on hyperplane complements.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <utility>

#include "intgeo/forms.hpp"

namespace intgeo {

class Subspace {
 public:
  // `frame` must have orthonormal columns.
  explicit Subspace(Eigen::MatrixXd frame, double tol = 1e-12) : frame_(std::move(frame)) {
    Eigen::MatrixXd g = frame_.transpose() * frame_;
    if ((g - Eigen::MatrixXd::Identity(k(), k())).norm() > tol * std::max(1.0, std::sqrt(static_cast<double>(k()))))
      throw std::invalid_argument("Subspace: frame columns are not orthonormal");
  }

  int n() const { return static_cast<int>(frame_.rows()); }
  int k() const { return static_cast<int>(frame_.cols()); }
  const Eigen::MatrixXd& frame() const { return frame_; }

 private:
  Eigen::MatrixXd frame_;
};

// Orthonormalize the column span (columns must be independent).
inline Subspace subspace_from_span(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  for (int j = 0; j < m.cols(); ++j) {
    if (std::abs(r(j, j)) < 1e-12) throw std::invalid_argument("subspace_from_span: columns are dependent");
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return Subspace(std::move(q));
}

// Haar-uniform k-plane in R^n: Gaussian matrix + sign-fixed QR.
inline Subspace random_subspace(int n, int k, std::mt19937_64& rng) {
  if (k < 0 || k > n) throw std::invalid_argument("random_subspace: need 0 <= k <= n");
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = g(rng);
  return subspace_from_span(m);
}

inline Subspace orthogonal_complement(const Subspace& w) {
  const int n = w.n(), k = w.k();
  // the last n-k columns of the full Q factor span the complement
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w.frame());
  Eigen::MatrixXd q = qr.householderQ();
  return Subspace(q.rightCols(n - k));
}

// Squared calibration value f(W)^2 = eval(f, frame)^2; frame-independent.
inline double calibration_sq(const AlternatingForm& f, const Subspace& w) {
  if (f.dim() != w.n()) throw std::invalid_argument("calibration_sq: ambient dimension mismatch");
  if (f.degree() != w.k()) throw std::invalid_argument("calibration_sq: degree must equal subspace dimension");
  double v = eval(f, w.frame());
  return v * v;
}

// Isometric identification of C^m with a 2m-dimensional subspace of R^n.
// Columns are ordered (x_1, y_1, ..., x_m, y_m) with J x_j = y_j; the
// hermitian structure (inner product, J, Omega = sum dx_j ^ dy_j, complex
// volume form) is read through these coordinates.
struct HermitianFrame {
  Eigen::MatrixXd frame;  // n x 2m, orthonormal columns
  int m() const { return static_cast<int>(frame.cols()) / 2; }
  int n() const { return static_cast<int>(frame.rows()); }
};

inline HermitianFrame standard_hermitian(int m) {
  return HermitianFrame{Eigen::MatrixXd::Identity(2 * m, 2 * m)};
}

namespace detail {

// Coordinates of W in the hermitian frame; requires W to lie in its span.
inline Eigen::MatrixXd hermitian_coords(const Subspace& w, const HermitianFrame& h) {
  if (h.n() != w.n()) throw std::invalid_argument("hermitian_coords: ambient dimension mismatch");
  Eigen::MatrixXd c = h.frame.transpose() * w.frame();
  if ((w.frame() - h.frame * c).norm() > 1e-10)
    throw std::invalid_argument("hermitian_coords: subspace does not lie in the hermitian span");
  return c;  // 2m x k, orthonormal columns
}

inline Eigen::MatrixXd omega_gram(const Eigen::MatrixXd& c) {
  const int m = static_cast<int>(c.rows()) / 2;
  const int k = static_cast<int>(c.cols());
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i) {
    a(i, i) = 0.0;
    for (int j = i + 1; j < k; ++j) {
      double s = 0.0;
      for (int p = 0; p < m; ++p) s += c(2 * p, i) * c(2 * p + 1, j) - c(2 * p + 1, i) * c(2 * p, j);
      a(i, j) = s;
      a(j, i) = -s;
    }
  }
  return a;
}

inline Eigen::MatrixXcd complex_coords(const Eigen::MatrixXd& c) {
  const int m = static_cast<int>(c.rows()) / 2;
  const int k = static_cast<int>(c.cols());
  Eigen::MatrixXcd z(m, k);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i) z(j, i) = std::complex<double>(c(2 * j, i), c(2 * j + 1, i));
  return z;
}

inline double pfaffian(const Eigen::MatrixXd& a) {
  switch (a.rows()) {
    case 0: return 1.0;
    case 2: return a(0, 1);
    case 4:
      return a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
    default:
      throw std::invalid_argument("pfaffian: only sizes 0, 2, 4 supported");
  }
}

}  // namespace detail

struct KaehlerAngles {
  Eigen::VectorXd theta;    // ascending, p = floor(k/2) entries in [0, pi/2]
  Eigen::VectorXd cosines;  // descending, same length
};

// Kaehler angles of a k-plane: cos(theta_i) are the paired singular values of
// the k x k skew matrix A_{ij} = Omega(w_i, w_j).
inline KaehlerAngles kaehler_angles(const Subspace& w, const HermitianFrame& h) {
  Eigen::MatrixXd c = detail::hermitian_coords(w, h);
  Eigen::MatrixXd a = detail::omega_gram(c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const int p = w.k() / 2;
  KaehlerAngles out{Eigen::VectorXd(p), Eigen::VectorXd(p)};
  for (int i = 0; i < p; ++i) {
    double cv = 0.5 * (sv(2 * i) + sv(2 * i + 1));
    cv = std::clamp(cv, 0.0, 1.0);
    out.cosines(i) = cv;
    out.theta(i) = std::acos(cv);
  }
  return out;
}

struct ThetaInvariant {
  std::complex<double> value;
  bool sign_determined;  // false when Omega|_W is degenerate (sign is frame-dependent)
};

// Complex determinant invariant of a half-dimensional plane (k == m). When
// Omega|_W is non-degenerate the frame is orientation-corrected so that the
// restricted Kaehler pfaffian is positive; otherwise only |Theta| and Theta^2
// are well-defined and the returned sign is the frame's.
inline ThetaInvariant theta_invariant(const Subspace& w, const HermitianFrame& h,
                                      double degenerate_tol = 1e-12) {
  if (w.k() != h.m()) throw std::invalid_argument("theta_invariant: need k == m (half-dimensional plane)");
  Eigen::MatrixXd c = detail::hermitian_coords(w, h);
  std::complex<double> th = detail::complex_coords(c).determinant();
  const int k = w.k();
  if (k % 2 != 0) return {th, false};
  Eigen::MatrixXd a = detail::omega_gram(c);
  double pf = detail::pfaffian(a);
  if (std::abs(pf) <= degenerate_tol) return {th, false};
  if (pf < 0) th = -th;
  return {th, true};
}

// Klain weight of the Cayley valuation computed through hermitian data:
// (1/2) sigma_0 - (1/2) sigma_1 + (3/2) sigma_2 + Re((1/2) Theta^2 + 2 cos t1 cos t2 Theta),
// sigma_q elementary symmetric in cos^2(theta_i). Equals the squared Cayley
// calibration on Gr_4(R^8).
inline double cayley_sq_via_angles(const Subspace& w, const HermitianFrame& h) {
  if (w.k() != 4 || h.m() != 4) throw std::invalid_argument("cayley_sq_via_angles: need a 4-plane in C^4");
  KaehlerAngles ka = kaehler_angles(w, h);
  ThetaInvariant th = theta_invariant(w, h);
  const double c1 = ka.cosines(0), c2 = ka.cosines(1);
  const double s1 = c1 * c1 + c2 * c2;
  const double s2 = c1 * c1 * c2 * c2;
  return 0.5 - 0.5 * s1 + 1.5 * s2 + std::real(0.5 * th.value * th.value + 2.0 * c1 * c2 * th.value);
}

inline double cayley_sq_via_angles(const Subspace& w) { return cayley_sq_via_angles(w, standard_hermitian(4)); }

// Complex structure J on the hyperplane x^perp induced by a positive 3-form:
// <v, w> = (i_x phi)(J v, w) on x^perp. Returned as an n x n matrix acting as
// J on x^perp and as 0 on the line through x.
inline Eigen::MatrixXd induced_complex_structure(const Eigen::VectorXd& x, const AlternatingForm& phi,
                                                 double tol = 1e-10) {
  const int n = phi.dim();
  if (x.size() != n) throw std::invalid_argument("induced_complex_structure: dimension mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-12) throw std::invalid_argument("induced_complex_structure: x must be a unit vector");
  AlternatingForm ix = interior_product(x, phi);
  // orthonormal basis of x^perp
  Eigen::MatrixXd line = x;
  Subspace perp = orthogonal_complement(Subspace(line));
  const Eigen::MatrixXd& b = perp.frame();  // n x (n-1)
  AlternatingForm sform = pullback(ix, b);  // 2-form on R^{n-1}
  Eigen::MatrixXd s(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) s(i, j) = (i == j) ? 0.0 : sform.coeff({i, j});
  Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
  if (!lu.isInvertible())
    throw std::invalid_argument("induced_complex_structure: restricted 2-form is degenerate");
  Eigen::MatrixXd jm = -lu.inverse();
  if ((jm * jm + Eigen::MatrixXd::Identity(n - 1, n - 1)).norm() > tol)
    throw std::invalid_argument("induced_complex_structure: restricted 2-form is not orthogonal-symplectic");
  return b * jm * b.transpose();
}

// Hermitian frame (x_1, y_1, x_2, y_2, x_3, y_3) of x^perp in R^7, adapted to
// the 3-form so that the real part of its complex volume form equals the
// restriction of phi. With this trivialization phi(W) = Re Theta(W) for
// 3-planes W inside x^perp.
inline HermitianFrame adapted_hermitian_frame(const Eigen::VectorXd& x, const AlternatingForm& phi) {
  const int n = phi.dim();
  if (n != 7 || phi.degree() != 3) throw std::invalid_argument("adapted_hermitian_frame: expected a 3-form on R^7");
  Eigen::MatrixXd j = induced_complex_structure(x, phi);
  Eigen::MatrixXd line = x;
  Subspace perp = orthogonal_complement(Subspace(line));

  // greedy J-adapted orthonormal frame
  Eigen::MatrixXd u(n, 6);
  int placed = 0;
  auto project_out = [&](Eigen::VectorXd v) {
    v -= x * (x.dot(v));
    for (int c = 0; c < placed; ++c) v -= u.col(c) * (u.col(c).dot(v));
    return v;
  };
  Eigen::VectorXd seed = perp.frame().col(0);
  for (int pair = 0; pair < 3; ++pair) {
    Eigen::VectorXd v = project_out(seed);
    v.normalize();
    u.col(placed++) = v;
    u.col(placed++) = j * v;
    if (pair < 2) {
      for (int c = 0; c < n; ++c) {
        Eigen::VectorXd cand = project_out(Eigen::VectorXd::Unit(n, c));
        if (cand.norm() > 1e-6) {
          seed = cand;
          break;
        }
      }
    }
  }

  // phase-align the first complex coordinate: w = phi(u1,u2,u3) - i phi(Ju1,u2,u3)
  Eigen::MatrixXd tri(n, 3);
  tri.col(0) = u.col(0);
  tri.col(1) = u.col(2);
  tri.col(2) = u.col(4);
  double wre = eval(phi, tri);
  tri.col(0) = u.col(1);  // J u1
  double wim = -eval(phi, tri);
  std::complex<double> wph(wre, wim);
  if (std::abs(std::abs(wph) - 1.0) > 1e-9)
    throw std::invalid_argument("adapted_hermitian_frame: volume-form phase is not a unit complex number");
  Eigen::VectorXd u1 = wre * u.col(0) - wim * u.col(1);
  Eigen::VectorXd y1 = wre * u.col(1) + wim * u.col(0);  // J u1'
  HermitianFrame out{Eigen::MatrixXd(n, 6)};
  out.frame.col(0) = u1;
  out.frame.col(1) = y1;
  out.frame.rightCols(4) = u.rightCols(4);
  return out;
}

}  // namespace intgeo
