#pragma once

// Convex polytopes in R^n with face enumeration, Gaussian outer angles,
// intrinsic volumes, and support-oracle intersection testing.
//
// Three representations are supported: oriented boxes (a center, an
// orthonormal n x k frame and k half-lengths), simplices (k+1 affinely
// independent vertices), and isometrically embedded products of two factors.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "intgeo/common.hpp"

namespace intgeo {

// A d-dimensional face together with its normal-cone description:
// N(F) = { u : u ⟂ tangent, cone_dirs^T u <= 0 componentwise }.
struct Face {
  Eigen::MatrixXd tangent;    // n x d, orthonormal columns
  Eigen::VectorXd point;      // a point in the relative interior
  double volume = 1.0;        // d-dimensional volume
  Eigen::MatrixXd cone_dirs;  // n x m halfspace directions
};

enum class PolytopeKind { Box, Simplex, Product };

class Polytope {
 public:
  static Polytope box(Eigen::VectorXd center, Eigen::MatrixXd frame, Eigen::VectorXd half_lengths) {
    if (frame.rows() != center.size() || frame.cols() != half_lengths.size())
      throw std::invalid_argument("Polytope::box: inconsistent shapes");
    if ((half_lengths.array() < 0).any()) throw std::invalid_argument("Polytope::box: negative half-length");
    // drop degenerate axes so that faces are not double counted
    std::vector<int> keep;
    for (int j = 0; j < half_lengths.size(); ++j)
      if (half_lengths(j) > 0) keep.push_back(j);
    Eigen::MatrixXd f(frame.rows(), static_cast<long>(keep.size()));
    Eigen::VectorXd h(static_cast<long>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) {
      f.col(static_cast<long>(j)) = frame.col(keep[j]);
      h(static_cast<long>(j)) = half_lengths(keep[j]);
    }
    if ((f.transpose() * f - Eigen::MatrixXd::Identity(f.cols(), f.cols())).norm() > 1e-10)
      throw std::invalid_argument("Polytope::box: frame columns are not orthonormal");
    return Polytope(BoxData{std::move(center), std::move(f), std::move(h)});
  }

  static Polytope point(Eigen::VectorXd position) {
    const long n = position.size();
    return box(std::move(position), Eigen::MatrixXd(n, 0), Eigen::VectorXd(0));
  }

  // Axis-aligned cube of the given side length centered at the origin.
  static Polytope cube(int n, double side) {
    return box(Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n),
               Eigen::VectorXd::Constant(n, side / 2.0));
  }

  static Polytope simplex(Eigen::MatrixXd vertices) {
    const long k = vertices.cols() - 1;
    if (k < 0 || k > vertices.rows()) throw std::invalid_argument("Polytope::simplex: bad vertex count");
    if (k > 0) {
      Eigen::MatrixXd edges = vertices.rightCols(k).colwise() - vertices.col(0);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(edges);
      if (svd.singularValues()(k - 1) < 1e-12)
        throw std::invalid_argument("Polytope::simplex: vertices are affinely dependent");
    }
    return Polytope(SimplexData{std::move(vertices)});
  }

  static Polytope product(Polytope a, Polytope b) {
    const int n = a.ambient_dim() + b.ambient_dim();
    ProductData d{std::make_shared<Polytope>(std::move(a)), std::make_shared<Polytope>(std::move(b)),
                  Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
    return Polytope(std::move(d));
  }

  PolytopeKind kind() const { return static_cast<PolytopeKind>(data_.index()); }

  int ambient_dim() const {
    switch (kind()) {
      case PolytopeKind::Box: return static_cast<int>(std::get<BoxData>(data_).center.size());
      case PolytopeKind::Simplex: return static_cast<int>(std::get<SimplexData>(data_).verts.rows());
      default: return static_cast<int>(std::get<ProductData>(data_).translation.size());
    }
  }

  int intrinsic_dim() const {
    switch (kind()) {
      case PolytopeKind::Box: return static_cast<int>(std::get<BoxData>(data_).half.size());
      case PolytopeKind::Simplex: return static_cast<int>(std::get<SimplexData>(data_).verts.cols()) - 1;
      default: {
        const auto& p = std::get<ProductData>(data_);
        return p.first->intrinsic_dim() + p.second->intrinsic_dim();
      }
    }
  }

  // Image under the isometry x -> q x + t.
  Polytope transformed(const Eigen::MatrixXd& q, const Eigen::VectorXd& t) const {
    const int n = ambient_dim();
    if (q.rows() != n || q.cols() != n || t.size() != n)
      throw std::invalid_argument("Polytope::transformed: shape mismatch");
    if ((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-10)
      throw std::invalid_argument("Polytope::transformed: matrix is not orthogonal");
    switch (kind()) {
      case PolytopeKind::Box: {
        const auto& b = std::get<BoxData>(data_);
        return Polytope(BoxData{q * b.center + t, q * b.frame, b.half});
      }
      case PolytopeKind::Simplex: {
        const auto& s = std::get<SimplexData>(data_);
        return Polytope(SimplexData{(q * s.verts).colwise() + t});
      }
      default: {
        const auto& p = std::get<ProductData>(data_);
        return Polytope(ProductData{p.first, p.second, q * p.rotation, q * p.translation + t});
      }
    }
  }

  Polytope translated(const Eigen::VectorXd& t) const {
    return transformed(Eigen::MatrixXd::Identity(ambient_dim(), ambient_dim()), t);
  }

  double support(const Eigen::VectorXd& u) const {
    switch (kind()) {
      case PolytopeKind::Box: {
        const auto& b = std::get<BoxData>(data_);
        return u.dot(b.center) + (b.half.array() * (b.frame.transpose() * u).array().abs()).sum();
      }
      case PolytopeKind::Simplex:
        return (std::get<SimplexData>(data_).verts.transpose() * u).maxCoeff();
      default: {
        const auto& p = std::get<ProductData>(data_);
        Eigen::VectorXd v = p.rotation.transpose() * u;
        return u.dot(p.translation) + p.first->support(v.head(p.first->ambient_dim())) +
               p.second->support(v.tail(p.second->ambient_dim()));
      }
    }
  }

  Eigen::VectorXd support_point(const Eigen::VectorXd& u) const {
    switch (kind()) {
      case PolytopeKind::Box: {
        const auto& b = std::get<BoxData>(data_);
        Eigen::VectorXd proj = b.frame.transpose() * u;
        Eigen::VectorXd x = b.center;
        for (int j = 0; j < b.half.size(); ++j) x += (proj(j) >= 0 ? b.half(j) : -b.half(j)) * b.frame.col(j);
        return x;
      }
      case PolytopeKind::Simplex: {
        const auto& s = std::get<SimplexData>(data_);
        Eigen::Index best = 0;
        (s.verts.transpose() * u).maxCoeff(&best);
        return s.verts.col(best);
      }
      default: {
        const auto& p = std::get<ProductData>(data_);
        Eigen::VectorXd v = p.rotation.transpose() * u;
        Eigen::VectorXd z(ambient_dim());
        z.head(p.first->ambient_dim()) = p.first->support_point(v.head(p.first->ambient_dim()));
        z.tail(p.second->ambient_dim()) = p.second->support_point(v.tail(p.second->ambient_dim()));
        return p.rotation * z + p.translation;
      }
    }
  }

  Eigen::MatrixXd vertices() const {
    switch (kind()) {
      case PolytopeKind::Box: {
        const auto& b = std::get<BoxData>(data_);
        const int k = static_cast<int>(b.half.size());
        Eigen::MatrixXd v(ambient_dim(), 1L << k);
        for (long m = 0; m < (1L << k); ++m) {
          Eigen::VectorXd x = b.center;
          for (int j = 0; j < k; ++j) x += ((m >> j) & 1 ? b.half(j) : -b.half(j)) * b.frame.col(j);
          v.col(m) = x;
        }
        return v;
      }
      case PolytopeKind::Simplex:
        return std::get<SimplexData>(data_).verts;
      default: {
        const auto& p = std::get<ProductData>(data_);
        Eigen::MatrixXd va = p.first->vertices(), vb = p.second->vertices();
        Eigen::MatrixXd v(ambient_dim(), va.cols() * vb.cols());
        long c = 0;
        for (long i = 0; i < va.cols(); ++i)
          for (long j = 0; j < vb.cols(); ++j) {
            Eigen::VectorXd z(ambient_dim());
            z.head(va.rows()) = va.col(i);
            z.tail(vb.rows()) = vb.col(j);
            v.col(c++) = p.rotation * z + p.translation;
          }
        return v;
      }
    }
  }

  double bounding_radius() const { return vertices().colwise().norm().maxCoeff(); }

  // All d-dimensional faces with their normal-cone data.
  std::vector<Face> faces(int d) const;

  // accessors for serialization and box surgery
  const Eigen::VectorXd& box_center() const { return std::get<BoxData>(data_).center; }
  const Eigen::MatrixXd& box_frame() const { return std::get<BoxData>(data_).frame; }
  const Eigen::VectorXd& box_half_lengths() const { return std::get<BoxData>(data_).half; }
  const Eigen::MatrixXd& simplex_vertices() const { return std::get<SimplexData>(data_).verts; }
  const Polytope& product_first() const { return *std::get<ProductData>(data_).first; }
  const Polytope& product_second() const { return *std::get<ProductData>(data_).second; }
  const Eigen::MatrixXd& product_rotation() const { return std::get<ProductData>(data_).rotation; }
  const Eigen::VectorXd& product_translation() const { return std::get<ProductData>(data_).translation; }

 private:
  struct BoxData {
    Eigen::VectorXd center;
    Eigen::MatrixXd frame;
    Eigen::VectorXd half;
  };
  struct SimplexData {
    Eigen::MatrixXd verts;
  };
  struct ProductData {
    std::shared_ptr<const Polytope> first, second;
    Eigen::MatrixXd rotation;
    Eigen::VectorXd translation;
  };

  explicit Polytope(BoxData d) : data_(std::move(d)) {}
  explicit Polytope(SimplexData d) : data_(std::move(d)) {}
  explicit Polytope(ProductData d) : data_(std::move(d)) {}

  std::variant<BoxData, SimplexData, ProductData> data_;
};

namespace detail {

inline void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

inline std::vector<Face> Polytope::faces(int d) const {
  std::vector<Face> out;
  if (d < 0 || d > intrinsic_dim()) return out;
  const int n = ambient_dim();
  switch (kind()) {
    case PolytopeKind::Box: {
      const auto& b = std::get<BoxData>(data_);
      const int k = static_cast<int>(b.half.size());
      detail::for_each_combination(k, d, [&](const std::vector<int>& free) {
        std::vector<int> fixed;
        for (int j = 0, f = 0; j < k; ++j) {
          if (f < d && free[f] == j)
            ++f;
          else
            fixed.push_back(j);
        }
        for (long signs = 0; signs < (1L << (k - d)); ++signs) {
          Face face;
          face.tangent.resize(n, d);
          face.volume = 1.0;
          for (int j = 0; j < d; ++j) {
            face.tangent.col(j) = b.frame.col(free[j]);
            face.volume *= 2.0 * b.half(free[j]);
          }
          face.point = b.center;
          face.cone_dirs.resize(n, k - d);
          for (int j = 0; j < k - d; ++j) {
            double eps = ((signs >> j) & 1) ? 1.0 : -1.0;
            face.point += eps * b.half(fixed[j]) * b.frame.col(fixed[j]);
            face.cone_dirs.col(j) = -eps * b.frame.col(fixed[j]);
          }
          out.push_back(std::move(face));
        }
      });
      return out;
    }
    case PolytopeKind::Simplex: {
      const auto& s = std::get<SimplexData>(data_);
      const int v = static_cast<int>(s.verts.cols());
      detail::for_each_combination(v, d + 1, [&](const std::vector<int>& sel) {
        Face face;
        Eigen::VectorXd base = s.verts.col(sel[0]);
        if (d > 0) {
          Eigen::MatrixXd edges(n, d);
          for (int j = 0; j < d; ++j) edges.col(j) = s.verts.col(sel[j + 1]) - base;
          Eigen::HouseholderQR<Eigen::MatrixXd> qr(edges);
          face.tangent = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
          face.volume = std::abs((Eigen::MatrixXd(qr.matrixQR().topRows(d).triangularView<Eigen::Upper>()))
                                     .diagonal()
                                     .prod());
          for (int j = 2; j <= d; ++j) face.volume /= j;
        } else {
          face.tangent.resize(n, 0);
          face.volume = 1.0;
        }
        face.point = base;
        for (int j = 1; j <= d; ++j) face.point += (s.verts.col(sel[j]) - base) / (d + 1.0);
        face.cone_dirs.resize(n, v - d - 1);
        int c = 0;
        std::vector<bool> used(v, false);
        for (int j : sel) used[j] = true;
        for (int j = 0; j < v; ++j)
          if (!used[j]) face.cone_dirs.col(c++) = s.verts.col(j) - base;
        out.push_back(std::move(face));
      });
      return out;
    }
    default: {
      const auto& p = std::get<ProductData>(data_);
      const int na = p.first->ambient_dim();
      const int nb = p.second->ambient_dim();
      for (int a = std::max(0, d - p.second->intrinsic_dim()); a <= std::min(d, p.first->intrinsic_dim()); ++a) {
        std::vector<Face> fa = p.first->faces(a);
        std::vector<Face> fb = p.second->faces(d - a);
        for (const Face& x : fa)
          for (const Face& y : fb) {
            Face face;
            face.tangent.setZero(n, d);
            face.tangent.topLeftCorner(na, a) = x.tangent;
            face.tangent.bottomRightCorner(nb, d - a) = y.tangent;
            face.tangent = p.rotation * face.tangent;
            face.volume = x.volume * y.volume;
            Eigen::VectorXd z(n);
            z.head(na) = x.point;
            z.tail(nb) = y.point;
            face.point = p.rotation * z + p.translation;
            face.cone_dirs.setZero(n, x.cone_dirs.cols() + y.cone_dirs.cols());
            face.cone_dirs.topLeftCorner(na, x.cone_dirs.cols()) = x.cone_dirs;
            face.cone_dirs.bottomRightCorner(nb, y.cone_dirs.cols()) = y.cone_dirs;
            face.cone_dirs = p.rotation * face.cone_dirs;
            out.push_back(std::move(face));
          }
      }
      return out;
    }
  }
}

struct OuterAngle {
  double value = 0.0;
  double std_error = 0.0;
  bool analytic = true;
};

// Gaussian measure of the normal cone of a face inside the full orthogonal
// complement of its tangent. Exact when the projected constraint directions
// are mutually orthogonal (boxes, right-angled corners); otherwise Monte
// Carlo over the standard Gaussian with a binomial standard error.
inline OuterAngle outer_angle(const Face& face, std::mt19937_64& rng, int samples = 1'000'000) {
  const int n = static_cast<int>(face.tangent.rows());
  const int d = static_cast<int>(face.tangent.cols());
  const int m = static_cast<int>(face.cone_dirs.cols());
  if (m == 0) return {1.0, 0.0, true};

  // project constraints onto the orthogonal complement of the tangent
  Eigen::MatrixXd proj = face.cone_dirs;
  if (d > 0) proj -= face.tangent * (face.tangent.transpose() * face.cone_dirs);
  for (int j = 0; j < m; ++j) {
    double norm = proj.col(j).norm();
    if (norm < 1e-12) throw std::invalid_argument("outer_angle: constraint direction lies in the tangent");
    proj.col(j) /= norm;
  }
  Eigen::MatrixXd gram = proj.transpose() * proj;
  if ((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10)
    return {std::pow(0.5, m), 0.0, true};

  // the measure only depends on the span of the constraints: sample there
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(proj);
  int r = std::min(m, n - d);
  Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  Eigen::MatrixXd g = proj.transpose() * basis;  // m x r constraint coordinates
  std::normal_distribution<double> gauss;
  long hits = 0;
  Eigen::VectorXd u(r);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < r; ++i) u(i) = gauss(rng);
    if (((g * u).array() <= 0.0).all()) ++hits;
  }
  double p = static_cast<double>(hits) / samples;
  return {p, std::sqrt(std::max(p * (1.0 - p), 1e-300) / samples), false};
}

struct IntrinsicVolumes {
  Eigen::VectorXd values;      // indices 0..n
  Eigen::VectorXd std_errors;  // zero where every outer angle was analytic
};

// mu_d(P) = sum over d-faces of outer angle times face volume.
inline IntrinsicVolumes intrinsic_volumes(const Polytope& p, std::mt19937_64& rng, int angle_samples = 1'000'000) {
  const int n = p.ambient_dim();
  IntrinsicVolumes out{Eigen::VectorXd::Zero(n + 1), Eigen::VectorXd::Zero(n + 1)};
  for (int d = 0; d <= p.intrinsic_dim(); ++d) {
    CompensatedSum value;
    double var = 0.0;
    for (const Face& f : p.faces(d)) {
      OuterAngle a = outer_angle(f, rng, angle_samples);
      value.add(a.value * f.volume);
      var += a.std_error * a.std_error * f.volume * f.volume;
    }
    out.values(d) = value.value();
    out.std_errors(d) = std::sqrt(var);
  }
  return out;
}

namespace detail {

// Coefficients of the minimum-norm point in the affine hull of the columns.
inline Eigen::VectorXd affine_mnp_coeffs(const Eigen::MatrixXd& c) {
  const long m = c.cols();
  Eigen::MatrixXd a(m + 1, m + 1);
  a.topLeftCorner(m, m) = c.transpose() * c;
  a.topRightCorner(m, 1).setOnes();
  a.bottomLeftCorner(1, m).setOnes();
  a(m, m) = 0.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  b(m) = 1.0;
  return a.completeOrthogonalDecomposition().solve(b).head(m);
}

// Wolfe's minimum-norm-point algorithm over a convex body given by a support
// oracle. Returns the distance from the origin; sets *converged.
template <class SupportPoint>
double mnp_distance(SupportPoint&& support_point, int n, double tol, int max_major, bool* converged) {
  *converged = false;
  std::vector<Eigen::VectorXd> corral;
  corral.push_back(support_point(-Eigen::VectorXd::Ones(n).normalized()));
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd x = corral[0];
  double best_sq = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int major = 0; major < max_major; ++major) {
    if (x.norm() <= tol) {
      *converged = true;
      return x.norm();
    }
    Eigen::VectorXd w = support_point(-x);
    double scale = std::max(1.0, x.norm());
    if (x.squaredNorm() - x.dot(w) <= tol * scale) {
      *converged = true;
      return x.norm();
    }
    // A support point the corral already contains cannot enlarge the hull, so
    // no further descent is possible: the iterate is at numerical resolution.
    // Likewise when the squared norm stops decreasing. Both happen on grazing
    // configurations whose degenerate face ties make the exact test above
    // unreachable; accept the current point instead of cycling forever.
    bool repeat = false;
    for (const Eigen::VectorXd& c : corral) repeat = repeat || (c - w).norm() <= 1e-13 * scale;
    if (repeat) {
      *converged = true;
      return x.norm();
    }
    if (x.squaredNorm() >= best_sq * (1.0 - 1e-12)) {
      if (++stalled >= 5) {
        *converged = true;
        return x.norm();
      }
    } else {
      stalled = 0;
    }
    best_sq = std::min(best_sq, x.squaredNorm());
    corral.push_back(w);
    Eigen::VectorXd ext(corral.size());
    ext.head(lambda.size()) = lambda;
    ext(lambda.size()) = 0.0;
    lambda = ext;
    // minor cycle: move to the minimum-norm point of the corral's convex hull
    for (int minor = 0; minor < 4 * n + 16; ++minor) {
      Eigen::MatrixXd c(n, corral.size());
      for (size_t i = 0; i < corral.size(); ++i) c.col(static_cast<long>(i)) = corral[i];
      Eigen::VectorXd mu = affine_mnp_coeffs(c);
      if ((mu.array() >= -1e-13).all()) {
        lambda = mu.cwiseMax(0.0);
        lambda /= lambda.sum();
        x = c * lambda;
        break;
      }
      double theta = 1.0;
      for (long i = 0; i < mu.size(); ++i)
        if (mu(i) < 0 && lambda(i) - mu(i) > 0) theta = std::min(theta, lambda(i) / (lambda(i) - mu(i)));
      lambda = (1.0 - theta) * lambda + theta * mu;
      std::vector<Eigen::VectorXd> kept;
      std::vector<double> kl;
      for (long i = 0; i < lambda.size(); ++i)
        if (lambda(i) > 1e-13) {
          kept.push_back(corral[static_cast<size_t>(i)]);
          kl.push_back(lambda(i));
        }
      if (kept.empty()) {
        kept.push_back(corral.back());
        kl.push_back(1.0);
      }
      corral = std::move(kept);
      lambda = Eigen::Map<Eigen::VectorXd>(kl.data(), static_cast<long>(kl.size()));
      lambda /= lambda.sum();
    }
  }
  return x.norm();
}

}  // namespace detail

// Distance between `a` and `b + b_offset` (0 when they intersect), computed
// as the norm of the minimum-norm point of the Minkowski difference. Falls
// back to the explicit vertex cloud if the support-oracle iteration stalls.
// The offset form avoids rebuilding polytopes in translation-heavy loops.
inline double distance(const Polytope& a, const Polytope& b, const Eigen::VectorXd& b_offset,
                       double tol = 1e-9) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("distance: ambient dimensions differ");
  const int n = a.ambient_dim();
  bool converged = false;
  double dist = detail::mnp_distance(
      [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return a.support_point(u) - b.support_point(-u) - b_offset;
      },
      n, tol, 100, &converged);
  if (converged) return dist;
  // fallback: exact support over the explicit difference vertex cloud
  Eigen::MatrixXd va = a.vertices(), vb = b.vertices();
  Eigen::MatrixXd diff(n, va.cols() * vb.cols());
  long c = 0;
  for (long i = 0; i < va.cols(); ++i)
    for (long j = 0; j < vb.cols(); ++j) diff.col(c++) = va.col(i) - vb.col(j) - b_offset;
  dist = detail::mnp_distance(
      [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::Index best = 0;
        (diff.transpose() * u).maxCoeff(&best);
        return diff.col(best);
      },
      n, tol, 1000, &converged);
  if (!converged) throw std::runtime_error("distance: minimum-norm-point iteration failed to converge");
  return dist;
}

inline double distance(const Polytope& a, const Polytope& b, double tol = 1e-9) {
  return distance(a, b, Eigen::VectorXd::Zero(a.ambient_dim()), tol);
}

inline bool intersects(const Polytope& a, const Polytope& b, const Eigen::VectorXd& b_offset,
                       double tol = 1e-9) {
  return distance(a, b, b_offset, tol) <= tol;
}

inline bool intersects(const Polytope& a, const Polytope& b, double tol = 1e-9) {
  return distance(a, b, tol) <= tol;
}

struct BoxSplit {
  Polytope lower, upper, interface;
};

// Cut a box by the hyperplane through the point at `fraction` along the given
// axis: returns the two closed halves and the shared degenerate box.
inline BoxSplit split_box(const Polytope& b, int axis, double fraction) {
  if (b.kind() != PolytopeKind::Box) throw std::invalid_argument("split_box: not a box");
  if (fraction <= 0.0 || fraction >= 1.0) throw std::invalid_argument("split_box: fraction must be in (0,1)");
  const Eigen::VectorXd& c = b.box_center();
  const Eigen::MatrixXd& f = b.box_frame();
  const Eigen::VectorXd& h = b.box_half_lengths();
  if (axis < 0 || axis >= h.size()) throw std::invalid_argument("split_box: axis out of range");
  double lo = -h(axis), hi = h(axis);
  double cut = lo + fraction * (hi - lo);
  Eigen::VectorXd h_low = h, h_high = h, h_mid = h;
  h_low(axis) = (cut - lo) / 2;
  h_high(axis) = (hi - cut) / 2;
  h_mid(axis) = 0.0;
  Eigen::VectorXd c_low = c + f.col(axis) * (lo + cut) / 2;
  Eigen::VectorXd c_high = c + f.col(axis) * (cut + hi) / 2;
  Eigen::VectorXd c_mid = c + f.col(axis) * cut;
  return {Polytope::box(c_low, f, h_low), Polytope::box(c_high, f, h_high), Polytope::box(c_mid, f, h_mid)};
}

}  // namespace intgeo
