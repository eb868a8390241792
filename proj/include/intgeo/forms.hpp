#pragma once

// Alternating multilinear forms on R^n (n <= 8) with dense coefficients over
// the sorted-index basis, plus the structure forms of exceptional holonomy:
// the associative 3-form on R^7, the Cayley 4-form on R^8, and the Kaehler /
// complex-volume forms of C^m sitting in R^{2m} with interleaved coordinates
// (x_1, y_1, ..., x_m, y_m), J x_j = y_j.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include "intgeo/common.hpp"

namespace intgeo {

class AlternatingForm {
 public:
  AlternatingForm(int dim, int degree)
      : dim_(dim), degree_(degree), c_(binomial(dim, degree), 0.0) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("AlternatingForm: dim must be 1..8");
    if (degree < 0 || degree > dim) throw std::invalid_argument("AlternatingForm: degree must be 0..dim");
  }

  static AlternatingForm basis(int dim, std::initializer_list<int> indices, double coeff = 1.0) {
    AlternatingForm f(dim, static_cast<int>(indices.size()));
    std::vector<int> idx(indices);
    f.add_term(idx, coeff);
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int terms() const { return static_cast<int>(c_.size()); }

  double& raw(int rank) { return c_[static_cast<std::size_t>(rank)]; }
  double raw(int rank) const { return c_[static_cast<std::size_t>(rank)]; }
  unsigned mask_of(int rank) const { return detail::subset_table(dim_, degree_).masks[static_cast<std::size_t>(rank)]; }

  // Signed coefficient lookup for indices in any order; repeated index -> 0.
  double coeff(std::span<const int> indices) const {
    auto [mask, sign] = mask_sign(indices);
    if (sign == 0) return 0.0;
    return sign * c_[static_cast<std::size_t>(detail::subset_table(dim_, degree_).rank[mask])];
  }
  double coeff(std::initializer_list<int> indices) const {
    std::vector<int> idx(indices);
    return coeff(std::span<const int>(idx));
  }

  void add_term(std::span<const int> indices, double v) {
    auto [mask, sign] = mask_sign(indices);
    if (sign == 0) {
      if (v != 0.0) throw std::invalid_argument("AlternatingForm: repeated index in term");
      return;
    }
    c_[static_cast<std::size_t>(detail::subset_table(dim_, degree_).rank[mask])] += sign * v;
  }
  void add_term(std::initializer_list<int> indices, double v) {
    std::vector<int> idx(indices);
    add_term(std::span<const int>(idx), v);
  }

  AlternatingForm& operator+=(const AlternatingForm& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  AlternatingForm& operator-=(const AlternatingForm& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  AlternatingForm& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend AlternatingForm operator+(AlternatingForm a, const AlternatingForm& b) { return a += b; }
  friend AlternatingForm operator-(AlternatingForm a, const AlternatingForm& b) { return a -= b; }
  friend AlternatingForm operator*(double s, AlternatingForm a) { return a *= s; }

  double norm() const {
    double s = 0.0;
    for (double x : c_) s += x * x;
    return std::sqrt(s);
  }

 private:
  void check_same(const AlternatingForm& o) const {
    if (dim_ != o.dim_ || degree_ != o.degree_)
      throw std::invalid_argument("AlternatingForm: dimension/degree mismatch");
  }

  // Returns (mask, sign); sign 0 when an index repeats.
  std::pair<unsigned, int> mask_sign(std::span<const int> indices) const {
    if (static_cast<int>(indices.size()) != degree_)
      throw std::invalid_argument("AlternatingForm: wrong number of indices");
    unsigned mask = 0;
    int sign = 1;
    for (int i : indices) {
      if (i < 0 || i >= dim_) throw std::invalid_argument("AlternatingForm: index out of range");
      unsigned bit = 1u << i;
      if (mask & bit) return {0u, 0};
      // parity of the number of already-placed indices larger than i
      sign *= (std::popcount(mask & ~((bit << 1) - 1)) % 2) ? -1 : 1;
      mask |= bit;
    }
    return {mask, sign};
  }

  int dim_, degree_;
  std::vector<double> c_;
};

namespace detail {

inline double small_det(const Eigen::MatrixXd& m) {
  switch (m.rows()) {
    case 0: return 1.0;
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: return m.determinant();
  }
}

}  // namespace detail

// Evaluate a k-form on k vectors (the columns of `vectors`).
inline double eval(const AlternatingForm& a, const Eigen::MatrixXd& vectors) {
  if (vectors.rows() != a.dim() || vectors.cols() != a.degree())
    throw std::invalid_argument("eval: expected a dim x degree matrix of column vectors");
  const int k = a.degree();
  if (k == 0) return a.raw(0);
  const auto& tab = detail::subset_table(a.dim(), k);
  Eigen::MatrixXd sub(k, k);
  double s = 0.0;
  for (int r = 0; r < a.terms(); ++r) {
    double c = a.raw(r);
    if (c == 0.0) continue;
    unsigned mask = tab.masks[static_cast<std::size_t>(r)];
    int row = 0;
    for (int i = 0; i < a.dim(); ++i)
      if (mask & (1u << i)) sub.row(row++) = vectors.row(i);
    s += c * detail::small_det(sub);
  }
  return s;
}

inline AlternatingForm wedge(const AlternatingForm& a, const AlternatingForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  if (a.degree() + b.degree() > a.dim()) throw std::invalid_argument("wedge: degree overflow");
  AlternatingForm out(a.dim(), a.degree() + b.degree());
  const auto& tout = detail::subset_table(a.dim(), out.degree());
  for (int ra = 0; ra < a.terms(); ++ra) {
    double ca = a.raw(ra);
    if (ca == 0.0) continue;
    unsigned ma = a.mask_of(ra);
    for (int rb = 0; rb < b.terms(); ++rb) {
      double cb = b.raw(rb);
      if (cb == 0.0) continue;
      unsigned mb = b.mask_of(rb);
      if (ma & mb) continue;
      out.raw(tout.rank[ma | mb]) += detail::merge_sign(ma, mb) * ca * cb;
    }
  }
  return out;
}

// Interior product i_x a: (i_x a)(v_2..v_k) = a(x, v_2, .., v_k).
inline AlternatingForm interior_product(const Eigen::VectorXd& x, const AlternatingForm& a) {
  if (a.degree() == 0) throw std::invalid_argument("interior_product: degree-0 form");
  if (x.size() != a.dim()) throw std::invalid_argument("interior_product: dimension mismatch");
  AlternatingForm out(a.dim(), a.degree() - 1);
  const auto& tout = detail::subset_table(a.dim(), out.degree());
  for (int r = 0; r < a.terms(); ++r) {
    double c = a.raw(r);
    if (c == 0.0) continue;
    unsigned mask = a.mask_of(r);
    int pos = 0;
    for (int j = 0; j < a.dim(); ++j) {
      unsigned bit = 1u << j;
      if (!(mask & bit)) continue;
      double xj = x[j];
      if (xj != 0.0) out.raw(tout.rank[mask ^ bit]) += ((pos % 2) ? -1.0 : 1.0) * xj * c;
      ++pos;
    }
  }
  return out;
}

// Pullback M*a on R^m for a linear map M: R^m -> R^n given as an n x m matrix:
// (M*a)(v_1..v_k) = a(Mv_1, .., Mv_k).
inline AlternatingForm pullback(const AlternatingForm& a, const Eigen::MatrixXd& M) {
  if (M.rows() != a.dim()) throw std::invalid_argument("pullback: matrix rows must equal form dimension");
  const int m = static_cast<int>(M.cols());
  const int k = a.degree();
  if (k > m) throw std::invalid_argument("pullback: degree exceeds domain dimension");
  AlternatingForm out(m, k);
  if (k == 0) {
    out.raw(0) = a.raw(0);
    return out;
  }
  const auto& tin = detail::subset_table(a.dim(), k);
  const auto& tout = detail::subset_table(m, k);
  Eigen::MatrixXd sub(k, k);
  for (int ro = 0; ro < out.terms(); ++ro) {
    unsigned mo = tout.masks[static_cast<std::size_t>(ro)];
    Eigen::MatrixXd cols(a.dim(), k);
    int cj = 0;
    for (int j = 0; j < m; ++j)
      if (mo & (1u << j)) cols.col(cj++) = M.col(j);
    double s = 0.0;
    for (int ri = 0; ri < a.terms(); ++ri) {
      double c = a.raw(ri);
      if (c == 0.0) continue;
      unsigned mi = tin.masks[static_cast<std::size_t>(ri)];
      int row = 0;
      for (int i = 0; i < a.dim(); ++i)
        if (mi & (1u << i)) sub.row(row++) = cols.row(i);
      s += c * detail::small_det(sub);
    }
    out.raw(ro) = s;
  }
  return out;
}

// Derivation action of a matrix X on forms, signed so that L_X a = 0 exactly
// when a is invariant under exp(tX):
// (L_X a)(v_1..v_k) = -sum_i a(v_1, .., X v_i, .., v_k).
inline AlternatingForm lie_derivation(const Eigen::MatrixXd& X, const AlternatingForm& a) {
  if (X.rows() != a.dim() || X.cols() != a.dim())
    throw std::invalid_argument("lie_derivation: matrix size mismatch");
  const int k = a.degree();
  AlternatingForm out(a.dim(), k);
  if (k == 0) return out;
  const auto& tab = detail::subset_table(a.dim(), k);
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::vector<int> probe(static_cast<std::size_t>(k));
  for (int r = 0; r < out.terms(); ++r) {
    unsigned mask = tab.masks[static_cast<std::size_t>(r)];
    int t = 0;
    for (int i = 0; i < a.dim(); ++i)
      if (mask & (1u << i)) idx[static_cast<std::size_t>(t++)] = i;
    double s = 0.0;
    for (int slot = 0; slot < k; ++slot) {
      probe = idx;
      for (int m = 0; m < a.dim(); ++m) {
        double x = X(m, idx[static_cast<std::size_t>(slot)]);
        if (x == 0.0) continue;
        probe[static_cast<std::size_t>(slot)] = m;
        s -= x * a.coeff(std::span<const int>(probe));
        probe[static_cast<std::size_t>(slot)] = idx[static_cast<std::size_t>(slot)];
      }
    }
    out.raw(r) = s;
  }
  return out;
}

struct GramForm {
  Eigen::MatrixXd entries;
};

// tau > 0: the value the volume functional assigns to the coordinate top form.
struct VolumeScale {
  double tau = 1.0;
};

// Coefficient of the coordinate top form (requires degree == dim).
inline double top_coefficient(const AlternatingForm& a) {
  if (a.degree() != a.dim()) throw std::invalid_argument("top_coefficient: not a top form");
  return a.raw(0);
}

// Euclidean coefficient inner product of two forms of equal type.
inline double inner(const AlternatingForm& a, const AlternatingForm& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree())
    throw std::invalid_argument("inner: dimension/degree mismatch");
  double s = 0.0;
  for (int r = 0; r < a.terms(); ++r) s += a.raw(r) * b.raw(r);
  return s;
}

// Hodge star for a positive definite Gram g and orientation sign (+1: the
// coordinate frame is positively oriented). Defined by
// alpha ^ (*beta) = <alpha, beta>_g vol_g for all alpha of the same degree.
inline AlternatingForm hodge_star(const AlternatingForm& a, const GramForm& g, int orientation = +1) {
  const int n = a.dim();
  const int k = a.degree();
  if (g.entries.rows() != n || g.entries.cols() != n)
    throw std::invalid_argument("hodge_star: Gram size mismatch");
  if (orientation != 1 && orientation != -1) throw std::invalid_argument("hodge_star: orientation must be +-1");
  Eigen::LLT<Eigen::MatrixXd> llt(g.entries);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("hodge_star: Gram not positive definite");
  const double det_g = g.entries.determinant();
  const Eigen::MatrixXd ginv = g.entries.inverse();
  const bool euclidean = g.entries.isIdentity(1e-14);

  AlternatingForm out(n, n - k);
  const auto& tin = detail::subset_table(n, k);
  const auto& tout = detail::subset_table(n, n - k);
  Eigen::MatrixXd sub(k, k);
  for (int ra = 0; ra < static_cast<int>(tin.masks.size()); ++ra) {
    unsigned ma = tin.masks[static_cast<std::size_t>(ra)];
    unsigned mc = (~ma) & ((1u << n) - 1u);
    int sign = detail::merge_sign(ma, mc) * orientation;
    double val = 0.0;
    if (euclidean) {
      val = a.raw(ra);
    } else {
      // <w_A, beta>_g = sum_B det(ginv[A,B]) beta_B
      std::vector<int> rows;
      rows.reserve(static_cast<std::size_t>(k));
      for (int i = 0; i < n; ++i)
        if (ma & (1u << i)) rows.push_back(i);
      for (int rb = 0; rb < a.terms(); ++rb) {
        double cb = a.raw(rb);
        if (cb == 0.0) continue;
        unsigned mb = tin.masks[static_cast<std::size_t>(rb)];
        int col = 0;
        for (int j = 0; j < n; ++j)
          if (mb & (1u << j)) {
            for (int i = 0; i < k; ++i) sub(i, col) = ginv(rows[static_cast<std::size_t>(i)], j);
            ++col;
          }
        val += detail::small_det(sub) * cb;
      }
      val *= std::sqrt(det_g);
    }
    out.raw(tout.rank[mc]) += sign * val;
  }
  return out;
}

inline AlternatingForm hodge_star(const AlternatingForm& a) {
  GramForm id{Eigen::MatrixXd::Identity(a.dim(), a.dim())};
  return hodge_star(a, id, +1);
}

// ---- structure forms ----

// Associative 3-form on R^7 (0-based index triples).
inline AlternatingForm associative_form() {
  AlternatingForm phi(7, 3);
  phi.add_term({0, 1, 2}, 1.0);
  phi.add_term({0, 3, 4}, 1.0);
  phi.add_term({0, 5, 6}, 1.0);
  phi.add_term({1, 3, 5}, 1.0);
  phi.add_term({1, 4, 6}, -1.0);
  phi.add_term({2, 3, 6}, -1.0);
  phi.add_term({2, 4, 5}, -1.0);
  return phi;
}

// Kaehler 2-form of C^m on R^{2m}: sum_j dx_j ^ dy_j.
inline AlternatingForm kaehler_form(int m) {
  AlternatingForm omega(2 * m, 2);
  for (int j = 0; j < m; ++j) omega.add_term({2 * j, 2 * j + 1}, 1.0);
  return omega;
}

namespace detail {

// Real or imaginary part of dz_1 ^ .. ^ dz_m, dz_j = dx_j + i dy_j.
inline AlternatingForm complex_volume_part(int m, bool real_part) {
  AlternatingForm out(2 * m, m);
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (unsigned s = 0; s < (1u << m); ++s) {
    int ny = std::popcount(s);
    // i^ny contributes to Re when ny % 4 in {0, 2}, to Im when in {1, 3}
    bool is_re = (ny % 2 == 0);
    if (is_re != real_part) continue;
    double sign = (ny % 4 == 0 || ny % 4 == 1) ? 1.0 : -1.0;
    for (int j = 0; j < m; ++j) idx[static_cast<std::size_t>(j)] = 2 * j + ((s >> j) & 1u ? 1 : 0);
    out.add_term(std::span<const int>(idx), sign);
  }
  return out;
}

}  // namespace detail

inline AlternatingForm complex_volume_re(int m) { return detail::complex_volume_part(m, true); }
inline AlternatingForm complex_volume_im(int m) { return detail::complex_volume_part(m, false); }

// Cayley 4-form on R^8 = C^4: (1/2) Omega^2 + Re(dz_1 dz_2 dz_3 dz_4).
inline AlternatingForm cayley_form() {
  AlternatingForm omega = kaehler_form(4);
  AlternatingForm half_omega2 = wedge(omega, omega);
  half_omega2 *= 0.5;
  return half_omega2 + complex_volume_re(4);
}

// Matrix of the cubic bilinear pairing b(x,y) = tau((1/6) i_x phi ^ i_y phi ^ phi)
// for a 3-form on R^7; `orientation * tau_value` is the value assigned to the
// coordinate top form.
inline Eigen::MatrixXd form_bilinear(const AlternatingForm& phi, double tau_value = 1.0, int orientation = +1) {
  if (phi.dim() != 7 || phi.degree() != 3)
    throw std::invalid_argument("form_bilinear: expected a 3-form on R^7");
  const int n = 7;
  std::vector<AlternatingForm> ie;
  ie.reserve(n);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) ie.push_back(interior_product(id.col(i), phi));
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = orientation * tau_value * top_coefficient(wedge(wedge(ie[static_cast<std::size_t>(i)], ie[static_cast<std::size_t>(j)]), phi)) / 6.0;
      b(i, j) = v;
      b(j, i) = v;
    }
  return b;
}

struct MetricNormalization {
  GramForm gram;        // positive definite inner product induced by the form
  VolumeScale scale;    // tau after rescaling (fixed point of tau -> tau')
  int orientation;      // +1 if the coordinate frame is positively oriented
  double residual;      // |det(gram)^{-1/2} - tau| at the fixed point
};

// Rescale the trial volume functional so the induced one reproduces it.
// Rescaling tau by t^2 rescales the induced tau' by t^-7, so the fixed point
// with trial tau_0 = 1 is t = det(G_0)^(-1/18).
inline MetricNormalization normalize_metric(const AlternatingForm& phi) {
  Eigen::MatrixXd b0 = form_bilinear(phi, 1.0, +1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b0);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  int orientation = +1;
  if (lo > 0.0) {
    // definite with the coordinate orientation
  } else if (hi < 0.0) {
    orientation = -1;
    b0 = -b0;
  } else {
    throw std::invalid_argument("normalize_metric: form is not positive (bilinear pairing not definite)");
  }
  const double det0 = b0.determinant();
  const double t = std::pow(det0, -1.0 / 18.0);
  const double t2 = t * t;
  MetricNormalization out{GramForm{t2 * b0}, VolumeScale{t2}, orientation, 0.0};
  out.residual = std::abs(std::pow(out.gram.entries.determinant(), -0.5) - out.scale.tau);
  return out;
}

// Frobenius-orthonormal basis of {X : g X + X^T g = 0, L_X f = 0 for all f}.
// For g = I these are the ordinary skew matrices annihilating every form in
// `forms`. Reports the singular-value gap separating the kept null directions
// from the rest when `gap_out` is given.
inline std::vector<Eigen::MatrixXd> annihilator_algebra(std::span<const AlternatingForm> forms,
                                                        const GramForm& g, double* gap_out = nullptr) {
  if (forms.empty()) throw std::invalid_argument("annihilator_algebra: no forms given");
  const int n = forms[0].dim();
  for (const auto& f : forms)
    if (f.dim() != n) throw std::invalid_argument("annihilator_algebra: mixed dimensions");
  if (g.entries.rows() != n || g.entries.cols() != n)
    throw std::invalid_argument("annihilator_algebra: Gram size mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(g.entries);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("annihilator_algebra: Gram not positive definite");
  const Eigen::MatrixXd ginv = g.entries.inverse();

  const int nskew = n * (n - 1) / 2;
  std::vector<Eigen::MatrixXd> basis;
  basis.reserve(static_cast<std::size_t>(nskew));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
      e(i, j) = inv_sqrt2;
      e(j, i) = -inv_sqrt2;
      basis.push_back(ginv * e);  // skew with respect to g
    }

  int rows = 0;
  for (const auto& f : forms) rows += f.terms();
  Eigen::MatrixXd A(rows, nskew);
  for (int c = 0; c < nskew; ++c) {
    int r0 = 0;
    for (const auto& f : forms) {
      AlternatingForm lf = lie_derivation(basis[static_cast<std::size_t>(c)], f);
      for (int r = 0; r < lf.terms(); ++r) A(r0 + r, c) = lf.raw(r);
      r0 += lf.terms();
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = std::max(1e-10 * sv(0), 1e-13);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  if (gap_out) {
    double kept = (rank < sv.size()) ? sv(rank) : 0.0;  // largest discarded
    double smallest_kept = (rank > 0) ? sv(rank - 1) : sv(0);
    *gap_out = (kept > 0.0) ? smallest_kept / kept : std::numeric_limits<double>::infinity();
  }
  const int dim_null = nskew - rank;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(dim_null));
  Eigen::MatrixXd vecs(n * n, dim_null);
  for (int c = 0; c < dim_null; ++c) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b < nskew; ++b) x += svd.matrixV()(b, rank + c) * basis[static_cast<std::size_t>(b)];
    vecs.col(c) = Eigen::Map<Eigen::VectorXd>(x.data(), n * n);
  }
  // Frobenius-orthonormalize (already orthonormal when g = I)
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vecs);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n * n, dim_null);
  for (int c = 0; c < dim_null; ++c) {
    Eigen::MatrixXd x = Eigen::Map<Eigen::MatrixXd>(q.col(c).data(), n, n);
    out.push_back(x);
  }
  return out;
}

inline std::vector<Eigen::MatrixXd> annihilator_algebra(const AlternatingForm& form, const GramForm& g,
                                                        double* gap_out = nullptr) {
  std::array<AlternatingForm, 1> fs{form};
  return annihilator_algebra(std::span<const AlternatingForm>(fs), g, gap_out);
}

}  // namespace intgeo
