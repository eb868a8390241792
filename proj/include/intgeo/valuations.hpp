#pragma once

// Translation-invariant valuations on convex polytopes, described by their
// Klain functions on the Grassmannian and evaluated as outer-angle-weighted
// sums over faces. Covers the intrinsic volumes, the two exceptional
// valuations attached to the stabilizer of the 3-form on R^7, the one
// attached to the 4-form on R^8, and the hermitian (Kaehler-angle) family
// used to decompose the latter.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "intgeo/forms.hpp"
#include "intgeo/grassmann.hpp"
#include "intgeo/polytope.hpp"

namespace intgeo {

enum class ValuationKind { Mu, Nu3, Nu4, Eta, Tasaki, SuPhi1, SuPhi2 };

// The two ambient structures valuations can refer to.
enum class Ambient { G2, Spin7 };

struct ValuationId {
  ValuationKind kind = ValuationKind::Mu;
  int degree = 0;  // homogeneity degree = dimension of the faces it weighs
  int index = 0;   // elementary-symmetric order for the Kaehler-angle family
  bool primed = false;

  static ValuationId mu(int k) { return {ValuationKind::Mu, k, 0, false}; }
  static ValuationId nu3(bool primed = false) { return {ValuationKind::Nu3, 3, 0, primed}; }
  static ValuationId nu4(bool primed = false) { return {ValuationKind::Nu4, 4, 0, primed}; }
  static ValuationId eta(bool primed = false) { return {ValuationKind::Eta, 4, 0, primed}; }
  static ValuationId tasaki(int k, int q) { return {ValuationKind::Tasaki, k, q, false}; }
  static ValuationId su_phi1() { return {ValuationKind::SuPhi1, 4, 0, false}; }
  static ValuationId su_phi2() { return {ValuationKind::SuPhi2, 4, 0, false}; }

  std::string name() const {
    std::string base;
    switch (kind) {
      case ValuationKind::Mu: base = "mu_" + std::to_string(degree); break;
      case ValuationKind::Nu3: base = "nu_3"; break;
      case ValuationKind::Nu4: base = "nu_4"; break;
      case ValuationKind::Eta: base = "eta"; break;
      case ValuationKind::Tasaki: base = "tasaki_" + std::to_string(degree) + "_" + std::to_string(index); break;
      case ValuationKind::SuPhi1: base = "su_phi_1"; break;
      case ValuationKind::SuPhi2: base = "su_phi_2"; break;
    }
    return primed ? base + "_prime" : base;
  }
};

// Inverse of ValuationId::name(); throws on anything it did not produce.
inline ValuationId valuation_from_name(std::string name) {
  bool primed = false;
  if (name.size() > 6 && name.substr(name.size() - 6) == "_prime") {
    primed = true;
    name = name.substr(0, name.size() - 6);
  }
  auto parse_int = [](const std::string& s) {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("valuation_from_name: trailing characters in '" + s + "'");
    return v;
  };
  try {
    if (name.rfind("mu_", 0) == 0 && !primed) return ValuationId::mu(parse_int(name.substr(3)));
    if (name == "nu_3") return ValuationId::nu3(primed);
    if (name == "nu_4") return ValuationId::nu4(primed);
    if (name == "eta") return ValuationId::eta(primed);
    if (name.rfind("tasaki_", 0) == 0 && !primed) {
      std::string rest = name.substr(7);
      std::size_t sep = rest.find('_');
      if (sep != std::string::npos)
        return ValuationId::tasaki(parse_int(rest.substr(0, sep)), parse_int(rest.substr(sep + 1)));
    }
    if (name == "su_phi_1" && !primed) return ValuationId::su_phi1();
    if (name == "su_phi_2" && !primed) return ValuationId::su_phi2();
  } catch (const std::exception&) {
    // fall through to the unified error below
  }
  throw std::invalid_argument("valuation_from_name: unknown valuation '" + name + (primed ? "_prime" : "") + "'");
}

namespace detail {

inline const AlternatingForm& g2_form() {
  static const AlternatingForm f = associative_form();
  return f;
}
inline const AlternatingForm& g2_dual_form() {
  static const AlternatingForm f = hodge_star(associative_form());
  return f;
}
inline const AlternatingForm& spin7_form() {
  static const AlternatingForm f = cayley_form();
  return f;
}
inline const HermitianFrame& c4_frame() {
  static const HermitianFrame h = standard_hermitian(4);
  return h;
}

inline double elementary_symmetric(const Eigen::VectorXd& x, int q) {
  // sigma_q by the stable recurrence over prefix products
  std::vector<double> e(static_cast<size_t>(q) + 1, 0.0);
  e[0] = 1.0;
  for (long i = 0; i < x.size(); ++i)
    for (int j = std::min<int>(q, static_cast<int>(i) + 1); j >= 1; --j) e[j] += x(i) * e[j - 1];
  return e[static_cast<size_t>(q)];
}

}  // namespace detail

// Klain function: the valuation's density on k-planes, evaluated on the
// tangent plane of a face. Throws if the subspace does not match the
// valuation's degree and ambient dimension.
inline double klain_weight(const ValuationId& id, const Subspace& w) {
  auto expect = [&](int n, int k) {
    if (w.n() != n || w.k() != k)
      throw std::invalid_argument("klain_weight: " + id.name() + " expects " + std::to_string(k) +
                                  "-planes in dimension " + std::to_string(n));
  };
  double base = 0.0;
  switch (id.kind) {
    case ValuationKind::Mu:
      if (w.k() != id.degree) throw std::invalid_argument("klain_weight: subspace dimension mismatch");
      return 1.0;  // no primed variant exists
    case ValuationKind::Nu3:
      expect(7, 3);
      base = calibration_sq(detail::g2_form(), w);
      break;
    case ValuationKind::Nu4:
      expect(7, 4);
      base = calibration_sq(detail::g2_dual_form(), w);
      break;
    case ValuationKind::Eta:
      expect(8, 4);
      base = calibration_sq(detail::spin7_form(), w);
      break;
    case ValuationKind::Tasaki: {
      if (w.n() != 8 || w.k() != id.degree)
        throw std::invalid_argument("klain_weight: Kaehler-angle valuation dimension mismatch");
      KaehlerAngles ka = kaehler_angles(w, detail::c4_frame());
      if (id.index > ka.cosines.size())
        throw std::invalid_argument("klain_weight: symmetric order exceeds angle count");
      return detail::elementary_symmetric(ka.cosines.array().square().matrix(), id.index);
    }
    case ValuationKind::SuPhi1: {
      expect(8, 4);
      KaehlerAngles ka = kaehler_angles(w, detail::c4_frame());
      ThetaInvariant th = theta_invariant(w, detail::c4_frame());
      // when the restricted Kaehler form degenerates the product of cosines
      // vanishes, so the undetermined sign is harmless
      return std::real(th.value) * ka.cosines.prod();
    }
    case ValuationKind::SuPhi2: {
      expect(8, 4);
      ThetaInvariant th = theta_invariant(w, detail::c4_frame());
      return std::real(th.value * th.value);
    }
  }
  return id.primed ? 5.0 * base - 1.0 : base;
}

struct ValuationResult {
  double value = 0.0;
  double std_error = 0.0;
};

// Evaluate a valuation on a polytope as the Klain-weighted, outer-angle
// weighted sum over faces of the matching dimension.
inline ValuationResult evaluate(const ValuationId& id, const Polytope& p, std::mt19937_64& rng,
                                int angle_samples = 1'000'000) {
  CompensatedSum value;
  double var = 0.0;
  for (const Face& f : p.faces(id.degree)) {
    double w = (id.degree == 0) ? 1.0 : klain_weight(id, Subspace(f.tangent));
    OuterAngle a = outer_angle(f, rng, angle_samples);
    value.add(a.value * w * f.volume);
    var += a.std_error * a.std_error * w * w * f.volume * f.volume;
  }
  return {value.value(), std::sqrt(var)};
}

// Worst deviation between the Klain function of `a` and that of `b` composed
// with the orthogonal complement, over Haar-random planes. Small values
// witness that the pair is exchanged by the duality on valuations.
inline double fourier_residual(const ValuationId& a, const ValuationId& b, int samples, std::mt19937_64& rng,
                               int ambient_dim = 0) {
  int n = ambient_dim;
  if (n == 0) n = (a.kind == ValuationKind::Nu3 || a.kind == ValuationKind::Nu4) ? 7 : 8;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Subspace w = random_subspace(n, a.degree, rng);
    double lhs = klain_weight(a, w);
    double rhs = klain_weight(b, orthogonal_complement(w));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

// Worst deviation, over Haar-random 4-planes in R^8, of the Klain function of
// the 4-form valuation from its expansion in the hermitian family:
// eta = 1/2 t_{4,0} - 1/2 t_{4,1} + 3/2 t_{4,2} + 1/2 s_2 + 2 s_1.
inline double eta_decomposition_residual(int samples, std::mt19937_64& rng) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Subspace w = random_subspace(8, 4, rng);
    double lhs = klain_weight(ValuationId::eta(), w);
    double rhs = 0.5 * klain_weight(ValuationId::tasaki(4, 0), w) -
                 0.5 * klain_weight(ValuationId::tasaki(4, 1), w) +
                 1.5 * klain_weight(ValuationId::tasaki(4, 2), w) +
                 0.5 * klain_weight(ValuationId::su_phi2(), w) + 2.0 * klain_weight(ValuationId::su_phi1(), w);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

struct RankCheckResult {
  std::vector<int> per_degree_rank;  // indices 0..n
  int total = 0;
  double min_conditioning = 0.0;  // worst ratio of smallest kept to largest singular value
};

// Numerical rank of the span of the candidate invariant valuations in each
// degree, measured through sampled Klain matrices. In both ambient structures
// the per-degree ranks must sum to 10: the 7-dimensional structure adds two
// exceptional valuations (degrees 3 and 4) to its eight intrinsic volumes,
// and the 8-dimensional one adds a single degree-4 valuation to its nine.
inline RankCheckResult hadwiger_rank_check(Ambient ambient, int samples_per_degree, std::mt19937_64& rng) {
  const int n = (ambient == Ambient::G2) ? 7 : 8;
  RankCheckResult out;
  out.per_degree_rank.assign(static_cast<size_t>(n) + 1, 0);
  out.min_conditioning = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    std::vector<ValuationId> cands{ValuationId::mu(k)};
    if (ambient == Ambient::G2 && k == 3) cands.push_back(ValuationId::nu3());
    if (ambient == Ambient::G2 && k == 4) cands.push_back(ValuationId::nu4());
    if (ambient == Ambient::Spin7 && k == 4) cands.push_back(ValuationId::eta());
    const int m = static_cast<int>(cands.size());
    Eigen::MatrixXd klain(m, samples_per_degree);
    for (int s = 0; s < samples_per_degree; ++s) {
      Subspace w = random_subspace(n, k, rng);
      for (int i = 0; i < m; ++i) klain(i, s) = klain_weight(cands[static_cast<size_t>(i)], w);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(klain);
    const auto& sv = svd.singularValues();
    int rank = 0;
    double tol = std::max(1e-10 * sv(0), 1e-12);
    for (long i = 0; i < sv.size(); ++i)
      if (sv(i) > tol) ++rank;
    out.min_conditioning = std::min(out.min_conditioning, sv(rank - 1) / sv(0));
    out.per_degree_rank[static_cast<size_t>(k)] = rank;
    out.total += rank;
  }
  return out;
}

// Independent construction of the degree-3 exceptional valuation as an
// integral over the unit normal disk bundle: for each 3-face, the calibration
// of the tangent is paired with the dual calibration of the oriented normal
// 4-frame, weighted by the spherical solid angle of the normal cone measured
// on the unit 3-sphere (area 2 pi^2), and the total is normalized by that
// same area. Agreement with the Klain-weighted face sum exercises both the
// duality pairing and the angle normalization.
inline ValuationResult nu3_disk_bundle(const Polytope& p, std::mt19937_64& rng, int sphere_samples = 200'000) {
  if (p.ambient_dim() != 7) throw std::invalid_argument("nu3_disk_bundle: ambient dimension must be 7");
  const AlternatingForm& phi = detail::g2_form();
  const AlternatingForm& psi = detail::g2_dual_form();
  CompensatedSum total;
  double var = 0.0;
  std::normal_distribution<double> gauss;
  for (const Face& f : p.faces(3)) {
    Subspace w(f.tangent);
    double cal = eval(phi, w.frame());
    // normal frame oriented so that [tangent | normal] is positive
    Subspace u = orthogonal_complement(w);
    Eigen::MatrixXd nf = u.frame();
    Eigen::MatrixXd joint(7, 7);
    joint.leftCols(3) = w.frame();
    joint.rightCols(4) = nf;
    if (joint.determinant() < 0) nf.col(3) = -nf.col(3);
    double dual = eval(psi, nf);

    // spherical measure of the normal cone on the unit 3-sphere of the
    // normal space
    double area, area_se;
    if (f.cone_dirs.cols() == 0) {
      area = unit_sphere_area(3);
      area_se = 0.0;
    } else {
      Eigen::MatrixXd constr = nf.transpose() * f.cone_dirs;  // cone in normal coordinates
      long hits = 0;
      Eigen::VectorXd dir(4);
      for (int s = 0; s < sphere_samples; ++s) {
        for (int i = 0; i < 4; ++i) dir(i) = gauss(rng);
        if (((constr.transpose() * dir).array() <= 0.0).all()) ++hits;
      }
      double frac = static_cast<double>(hits) / sphere_samples;
      area = frac * unit_sphere_area(3);
      area_se = std::sqrt(std::max(frac * (1.0 - frac), 1e-300) / sphere_samples) * unit_sphere_area(3);
    }
    total.add(f.volume * cal * dual * area);
    var += f.volume * f.volume * cal * cal * dual * dual * area_se * area_se;
  }
  double norm = 1.0 / unit_sphere_area(3);
  return {total.value() * norm, std::sqrt(var) * norm};
}

}  // namespace intgeo
