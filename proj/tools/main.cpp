// intgeo: a command-line laboratory for invariant valuations on convex
// polytopes.  Subcommands run algebraic identity suites, Haar-sampler
// diagnostics, valuation evaluation on polytopes, principal kinematic-formula
// experiments, and basis rank checks.  Every run emits a machine-readable
// report (JSON or CSV) whose JSON body is byte-stable for a fixed
// configuration and seed; only the timestamp in the header varies.
//
// Exit codes: 0 all enabled checks pass, 1 a check failed its tolerance,
// 2 configuration error, 3 sampler certification failure.

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "intgeo/common.hpp"
#include "intgeo/forms.hpp"
#include "intgeo/grassmann.hpp"
#include "intgeo/groups.hpp"
#include "intgeo/kinematics.hpp"
#include "intgeo/polytope.hpp"
#include "intgeo/serialization.hpp"
#include "intgeo/valuations.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using intgeo::ordered_json;

std::string iso_utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --- text utilities ----------------------------------------------------------

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

Eigen::VectorXd parse_vector(const std::string& s) {
  std::string cleaned = s;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (!in.eof()) throw std::invalid_argument("cannot parse vector '" + s + "'");
  if (vals.empty()) return Eigen::VectorXd();
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// An axis is either a basis token e0..e7 or an explicit coordinate vector.
Eigen::VectorXd parse_axis(const std::string& tok, int n) {
  if (tok.size() >= 2 && tok[0] == 'e' &&
      std::all_of(tok.begin() + 1, tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
    int idx = std::stoi(tok.substr(1));
    if (idx < 0 || idx >= n)
      throw std::invalid_argument("axis '" + tok + "' is out of range for dimension " + std::to_string(n));
    return Eigen::VectorXd::Unit(n, idx);
  }
  Eigen::VectorXd v = parse_vector(tok);
  if (v.size() != n)
    throw std::invalid_argument("axis '" + tok + "' has length " + std::to_string(v.size()) +
                                ", expected " + std::to_string(n));
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- report plumbing -----------------------------------------------------------

struct CheckRow {
  std::string check;
  long samples = 0;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison = "le";  // le: value <= threshold, ge: value >= threshold, eq: exact
  bool pass = false;
};

CheckRow make_row(std::string name, long samples, double value, double threshold,
                  std::string comparison = "le") {
  CheckRow r{std::move(name), samples, value, threshold, std::move(comparison), false};
  if (r.comparison == "le")
    r.pass = r.value <= r.threshold;
  else if (r.comparison == "ge")
    r.pass = r.value >= r.threshold;
  else
    r.pass = r.value == r.threshold;
  return r;
}

ordered_json rows_to_json(const std::vector<CheckRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows)
    arr.push_back(ordered_json{{"check", r.check},
                               {"samples", r.samples},
                               {"value", r.value},
                               {"threshold", r.threshold},
                               {"comparison", r.comparison},
                               {"pass", r.pass}});
  return arr;
}

std::string rows_to_csv(const std::vector<CheckRow>& rows) {
  std::string out = "check,samples,value,threshold,comparison,pass\n";
  for (const auto& r : rows)
    out += r.check + "," + std::to_string(r.samples) + "," + format_double(r.value) + "," +
           format_double(r.threshold) + "," + r.comparison + "," + (r.pass ? "true" : "false") + "\n";
  return out;
}

bool all_pass(const std::vector<CheckRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
  out << text;
}

ordered_json make_report(const std::string& command, ordered_json config, ordered_json results,
                         bool pass) {
  ordered_json report;
  report["header"] =
      ordered_json{{"tool", "intgeo"}, {"version", kVersion}, {"timestamp", iso_utc_now()}};
  report["command"] = command;
  report["config"] = std::move(config);
  report["results"] = std::move(results);
  report["pass"] = pass;
  return report;
}

// --- bodies ------------------------------------------------------------------

struct BodySpec {
  std::string family;        // box | cube | simplex
  std::string center;        // coordinate list
  std::string axes;          // ';'-separated axes (basis tokens or vectors)
  std::string half_lengths;  // coordinate list
  std::string vertices;      // ';'-separated coordinate lists
  int dim = 0;               // cube only
  double side = 1.0;         // cube only
  bool defined() const { return !family.empty(); }
};

intgeo::Polytope build_body(const BodySpec& b) {
  std::string fam = to_lower(b.family);
  if (fam == "cube") {
    if (b.dim <= 0) throw std::invalid_argument("cube body requires a positive dim");
    return intgeo::Polytope::cube(b.dim, b.side);
  }
  if (fam == "box") {
    Eigen::VectorXd center = parse_vector(b.center);
    const int n = static_cast<int>(center.size());
    if (n == 0) throw std::invalid_argument("box body requires a center");
    std::vector<std::string> toks = split(b.axes, ';');
    Eigen::MatrixXd frame(n, static_cast<Eigen::Index>(toks.size()));
    for (std::size_t c = 0; c < toks.size(); ++c) frame.col(static_cast<Eigen::Index>(c)) = parse_axis(toks[c], n);
    Eigen::VectorXd half = parse_vector(b.half_lengths);
    if (half.size() != frame.cols())
      throw std::invalid_argument("box body needs one half-length per axis");
    return intgeo::Polytope::box(std::move(center), std::move(frame), std::move(half));
  }
  if (fam == "simplex") {
    std::vector<std::string> toks = split(b.vertices, ';');
    if (toks.empty()) throw std::invalid_argument("simplex body requires vertices");
    Eigen::VectorXd v0 = parse_vector(toks[0]);
    Eigen::MatrixXd verts(v0.size(), static_cast<Eigen::Index>(toks.size()));
    verts.col(0) = v0;
    for (std::size_t c = 1; c < toks.size(); ++c) {
      Eigen::VectorXd v = parse_vector(toks[c]);
      if (v.size() != v0.size()) throw std::invalid_argument("simplex vertices differ in dimension");
      verts.col(static_cast<Eigen::Index>(c)) = v;
    }
    return intgeo::Polytope::simplex(std::move(verts));
  }
  throw std::invalid_argument("unknown body family '" + b.family + "' (expected box, cube, or simplex)");
}

intgeo::Polytope axis_unit_cube(int n, const std::vector<int>& axes) {
  Eigen::MatrixXd frame(n, static_cast<Eigen::Index>(axes.size()));
  for (std::size_t c = 0; c < axes.size(); ++c)
    frame.col(static_cast<Eigen::Index>(c)) = Eigen::VectorXd::Unit(n, axes[c]);
  return intgeo::Polytope::box(Eigen::VectorXd::Zero(n), std::move(frame),
                               Eigen::VectorXd::Constant(static_cast<Eigen::Index>(axes.size()), 0.5));
}

// Named unit-cube fixtures on distinguished coordinate planes.
std::optional<std::pair<intgeo::Polytope, std::string>> body_preset(const std::string& name) {
  if (name == "associative-box")
    return std::make_pair(axis_unit_cube(7, {0, 1, 2}), std::string("mu_3,nu_3,nu_3_prime"));
  if (name == "coassociative-box")
    return std::make_pair(axis_unit_cube(7, {3, 4, 5, 6}), std::string("mu_4,nu_4,nu_4_prime"));
  if (name == "negative-witness-box")
    return std::make_pair(axis_unit_cube(7, {2, 4, 5, 6}),
                          std::string("mu_4,nu_3,nu_4,nu_3_prime,nu_4_prime"));
  if (name == "real-4-plane-box")
    return std::make_pair(
        axis_unit_cube(8, {0, 2, 4, 6}),
        std::string("mu_4,eta,eta_prime,tasaki_4_0,tasaki_4_1,tasaki_4_2,su_phi_1,su_phi_2"));
  return std::nullopt;
}

// --- shared sampling helpers ---------------------------------------------------

Eigen::VectorXd random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v.normalized();
}

// Max per-entry z-scores of the first and second moments of v = g e_0 against
// the uniform-sphere law (mean 0, covariance I/n), with exact null variances.
std::pair<double, double> sphere_moment_z(const std::vector<Eigen::VectorXd>& vs) {
  const int n = static_cast<int>(vs.front().size());
  const double nn = static_cast<double>(n);
  const auto count = static_cast<double>(vs.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  for (const auto& v : vs) {
    mean += v;
    second += v * v.transpose();
  }
  mean /= count;
  second /= count;
  const double se_mean = std::sqrt(1.0 / (nn * count));
  double z_mean = (mean.cwiseAbs() / se_mean).maxCoeff();
  const double se_diag = std::sqrt((3.0 / (nn * (nn + 2.0)) - 1.0 / (nn * nn)) / count);
  const double se_off = std::sqrt(1.0 / (nn * (nn + 2.0)) / count);
  double z_cov = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dev = std::abs(second(i, j) - (i == j ? 1.0 / nn : 0.0));
      z_cov = std::max(z_cov, dev / (i == j ? se_diag : se_off));
    }
  return {z_mean, z_cov};
}

// The rank gap is infinite when the discarded singular values vanish exactly;
// saturate so the report stays valid JSON.
double finite_gap(double gap) {
  return std::isfinite(gap) ? gap : std::numeric_limits<double>::max();
}

double form_max_abs_diff(const intgeo::AlternatingForm& a, const intgeo::AlternatingForm& b) {
  double m = 0.0;
  for (int r = 0; r < a.terms(); ++r) m = std::max(m, std::abs(a.raw(r) - b.raw(r)));
  return m;
}

// --- check-identities ------------------------------------------------------------

std::vector<CheckRow> identity_checks_g2(long samples, double tol, double tol_exact,
                                         std::mt19937_64& rng) {
  using namespace intgeo;
  std::vector<CheckRow> rows;
  const AlternatingForm phi = associative_form();

  MetricNormalization mn = normalize_metric(phi);
  rows.push_back(make_row("metric_gram_identity", 1,
                          (mn.gram.entries - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff(),
                          tol_exact));
  rows.push_back(make_row("metric_fixed_point_residual", 1, mn.residual, tol_exact));

  double gap = 0.0;
  auto algebra = annihilator_algebra(phi, GramForm{Eigen::MatrixXd::Identity(7, 7)}, &gap);
  rows.push_back(make_row("stabilizer_algebra_dimension", 1, static_cast<double>(algebra.size()),
                          14.0, "eq"));
  rows.push_back(make_row("stabilizer_algebra_rank_gap", 1, finite_gap(gap), 1e6, "ge"));

  double r31 = 0.0, r32 = 0.0, r41 = 0.0, r42 = 0.0;
  for (long i = 0; i < samples; ++i) {
    Eigen::VectorXd x = random_unit(7, rng);
    HermitianFrame h = adapted_hermitian_frame(x, phi);
    {
      Subspace w6 = random_subspace(6, 3, rng);
      Subspace w(h.frame * w6.frame());
      double cal = eval(phi, w.frame());
      ThetaInvariant th = theta_invariant(w, h);
      KaehlerAngles ka = kaehler_angles(w, h);
      double c = ka.cosines(0);
      r31 = std::max(r31, std::abs(cal - std::real(th.value)));
      r32 = std::max(r32,
                     std::abs(cal * cal - 0.5 * (std::real(th.value * th.value) + 1.0 - c * c)));
    }
    {
      Subspace w6 = random_subspace(6, 4, rng);
      Subspace w(h.frame * w6.frame());
      KaehlerAngles ka = kaehler_angles(w, h);
      r41 = std::max(r41, std::abs(ka.cosines(0) - 1.0));
      double comp = calibration_sq(phi, orthogonal_complement(w));
      r42 = std::max(r42, std::abs(comp - ka.cosines(1) * ka.cosines(1)));
    }
  }
  rows.push_back(make_row("restriction_3plane_theta", samples, r31, tol));
  rows.push_back(make_row("restriction_3plane_squared", samples, r32, tol));
  rows.push_back(make_row("restriction_4plane_complex_line", samples, r41, std::max(tol, 1e-9)));
  rows.push_back(make_row("restriction_4plane_complement", samples, r42, tol));

  rows.push_back(make_row(
      "klain_duality_nu3_nu4", samples,
      fourier_residual(ValuationId::nu3(), ValuationId::nu4(), static_cast<int>(samples), rng),
      tol));

  {
    // normal-bundle integral against the face-sum evaluation on a slanted box
    Subspace w = random_subspace(7, 4, rng);
    Eigen::VectorXd half(4);
    half << 0.4, 0.7, 1.1, 0.6;
    Polytope b = Polytope::box(Eigen::VectorXd::Zero(7), w.frame(), half);
    int sphere_samples = static_cast<int>(std::max(samples, 20000L));
    ValuationResult disk = nu3_disk_bundle(b, rng, sphere_samples);
    ValuationResult face = evaluate(ValuationId::nu3(), b, rng);
    double se = std::sqrt(disk.std_error * disk.std_error + face.std_error * face.std_error);
    rows.push_back(make_row("normal_bundle_vs_face_sum", sphere_samples,
                            std::abs(disk.value - face.value), 3.0 * se + 1e-12));
  }
  return rows;
}

std::vector<CheckRow> identity_checks_spin7(long samples, double tol, double tol_exact,
                                            std::mt19937_64& rng) {
  using namespace intgeo;
  std::vector<CheckRow> rows;
  const AlternatingForm cay = cayley_form();

  double gap = 0.0;
  auto algebra = annihilator_algebra(cay, GramForm{Eigen::MatrixXd::Identity(8, 8)}, &gap);
  rows.push_back(make_row("stabilizer_algebra_dimension", 1, static_cast<double>(algebra.size()),
                          21.0, "eq"));
  rows.push_back(make_row("stabilizer_algebra_rank_gap", 1, finite_gap(gap), 1e6, "ge"));

  rows.push_back(make_row("self_duality_star", 1, form_max_abs_diff(hodge_star(cay), cay), tol_exact));

  HermitianFrame h = standard_hermitian(4);
  double r_klain = 0.0, r_norm = 0.0;
  for (long i = 0; i < samples; ++i) {
    Subspace w = random_subspace(8, 4, rng);
    r_klain = std::max(r_klain, std::abs(calibration_sq(cay, w) - cayley_sq_via_angles(w, h)));
    ThetaInvariant th = theta_invariant(w, h);
    KaehlerAngles ka = kaehler_angles(w, h);
    r_norm = std::max(r_norm, std::abs(std::abs(th.value) - ka.theta.array().sin().prod()));
  }
  rows.push_back(make_row("cayley_klain_decomposition", samples, r_klain, tol));
  rows.push_back(make_row("theta_norm_product_4", samples, r_norm, tol));

  rows.push_back(make_row("eta_tasaki_decomposition", samples,
                          eta_decomposition_residual(static_cast<int>(samples), rng), tol));
  rows.push_back(make_row(
      "klain_self_duality_eta", samples,
      fourier_residual(ValuationId::eta(), ValuationId::eta(), static_cast<int>(samples), rng),
      tol));
  return rows;
}

std::vector<CheckRow> identity_checks_su(long samples, double tol, std::mt19937_64& rng) {
  using namespace intgeo;
  std::vector<CheckRow> rows;
  for (int m : {3, 4}) {
    HermitianFrame h = standard_hermitian(m);
    double r = 0.0;
    for (long i = 0; i < samples; ++i) {
      Subspace w = random_subspace(2 * m, m, rng);
      ThetaInvariant th = theta_invariant(w, h);
      KaehlerAngles ka = kaehler_angles(w, h);
      r = std::max(r, std::abs(std::abs(th.value) - ka.theta.array().sin().prod()));
    }
    rows.push_back(make_row("theta_norm_product_" + std::to_string(m), samples, r, tol));
  }
  {
    auto sampler = make_sampler("su4");
    double r = 0.0;
    long reps = std::max(samples / 10, 1L);
    for (long i = 0; i < reps; ++i) {
      Eigen::MatrixXd g = sampler->sample(rng);
      int k = 2 + static_cast<int>(i % 3);
      Subspace w = random_subspace(8, k, rng);
      KaehlerAngles before = kaehler_angles(w, standard_hermitian(4));
      KaehlerAngles after = kaehler_angles(Subspace(g * w.frame()), standard_hermitian(4));
      r = std::max(r, (before.cosines - after.cosines).cwiseAbs().maxCoeff());
    }
    rows.push_back(make_row("kaehler_angle_invariance", reps, r, std::max(tol, 1e-8)));
  }
  return rows;
}

std::vector<CheckRow> identity_checks_so(int dim, long samples, double tol_exact,
                                         std::mt19937_64& rng) {
  using namespace intgeo;
  std::vector<CheckRow> rows;

  {
    // double Hodge star is the identity on these (degree, dimension) pairs
    std::normal_distribution<double> gauss;
    double r = 0.0;
    const std::pair<int, int> shapes[] = {{7, 3}, {8, 4}, {6, 2}};
    for (long i = 0; i < std::min(samples, 300L); ++i) {
      auto [n, k] = shapes[i % 3];
      AlternatingForm f(n, k);
      for (int t = 0; t < f.terms(); ++t) f.raw(t) = gauss(rng);
      r = std::max(r, form_max_abs_diff(hodge_star(hodge_star(f)), f));
    }
    rows.push_back(make_row("hodge_double_star_identity", std::min(samples, 300L), r, tol_exact));
  }

  SoSampler so(dim);
  double ortho = 0.0;
  double m2 = 0.0, m4 = 0.0, s2 = 0.0, s4 = 0.0;
  std::vector<Eigen::VectorXd> vs;
  vs.reserve(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i) {
    Eigen::MatrixXd g = so.sample(rng);
    ortho = std::max(
        {ortho, (g.transpose() * g - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff(),
         std::abs(g.determinant() - 1.0)});
    double e = g(0, 0);
    m2 += e * e;
    m4 += e * e * e * e;
    s2 += e * e * e * e;
    s4 += std::pow(e, 8);
    vs.push_back(g.col(0));
  }
  const auto count = static_cast<double>(samples);
  m2 /= count;
  m4 /= count;
  s2 = std::sqrt(std::max(s2 / count - m2 * m2, 0.0) / count);
  s4 = std::sqrt(std::max(s4 / count - m4 * m4, 0.0) / count);
  const double nn = static_cast<double>(dim);
  rows.push_back(make_row("haar_orthogonality_residual", samples, ortho, tol_exact));
  rows.push_back(make_row("haar_moment2_z", samples, std::abs(m2 - 1.0 / nn) / s2, 3.0));
  rows.push_back(
      make_row("haar_moment4_z", samples, std::abs(m4 - 3.0 / (nn * (nn + 2.0))) / s4, 3.0));
  auto [z_mean, z_cov] = sphere_moment_z(vs);
  rows.push_back(make_row("sphere_mean_z", samples, z_mean, 3.0));
  rows.push_back(make_row("sphere_covariance_z", samples, z_cov, 3.0));
  return rows;
}

// --- sample-diagnostics -----------------------------------------------------------

std::vector<CheckRow> diagnostics_walk(const std::string& which, long samples,
                                       const intgeo::WalkConfig& walk, std::mt19937_64& rng) {
  using namespace intgeo;
  std::unique_ptr<LieWalkSampler> sampler = which == "g2" ? g2_sampler(walk) : spin7_sampler(walk);
  std::vector<CheckRow> rows;
  rows.push_back(make_row("stabilizer_algebra_dimension", 1,
                          static_cast<double>(sampler->algebra_dimension()),
                          which == "g2" ? 14.0 : 21.0, "eq"));
  double max_res = 0.0;
  std::vector<Eigen::VectorXd> vs;
  vs.reserve(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i) {
    Eigen::MatrixXd g = sampler->sample(rng);
    max_res = std::max(max_res, sampler->certification_residual(g));
    vs.push_back(g.col(0));
  }
  rows.push_back(make_row("certification_max_residual", samples, max_res, walk.certify_tol));
  auto [z_mean, z_cov] = sphere_moment_z(vs);
  rows.push_back(make_row("sphere_mean_z", samples, z_mean, 3.0));
  rows.push_back(make_row("sphere_covariance_z", samples, z_cov, 3.0));
  return rows;
}

std::vector<CheckRow> diagnostics_classical(const std::string& which, int dim, long samples,
                                            std::mt19937_64& rng) {
  using namespace intgeo;
  auto sampler = make_sampler(which + std::to_string(dim));
  const int n = sampler->dim();
  std::vector<CheckRow> rows;
  double ortho = 0.0, omega_res = 0.0, vol_res = 0.0;
  std::vector<Eigen::VectorXd> vs;
  vs.reserve(static_cast<std::size_t>(samples));
  const bool unitary = which == "su";
  AlternatingForm omega = unitary ? kaehler_form(dim) : AlternatingForm(1, 0);
  AlternatingForm vol_re = unitary ? complex_volume_re(dim) : AlternatingForm(1, 0);
  for (long i = 0; i < samples; ++i) {
    Eigen::MatrixXd g = sampler->sample(rng);
    ortho = std::max(
        {ortho, (g.transpose() * g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(),
         std::abs(g.determinant() - 1.0)});
    if (unitary) {
      omega_res = std::max(omega_res, form_max_abs_diff(pullback(omega, g), omega));
      vol_res = std::max(vol_res, form_max_abs_diff(pullback(vol_re, g), vol_re));
    }
    vs.push_back(g.col(0));
  }
  rows.push_back(make_row("orthogonality_max_residual", samples, ortho, 1e-12));
  if (unitary) {
    rows.push_back(make_row("symplectic_invariance_residual", samples, omega_res, 1e-12));
    rows.push_back(make_row("complex_volume_invariance_residual", samples, vol_res, 1e-12));
  }
  auto [z_mean, z_cov] = sphere_moment_z(vs);
  rows.push_back(make_row("sphere_mean_z", samples, z_mean, 3.0));
  rows.push_back(make_row("sphere_covariance_z", samples, z_cov, 3.0));
  return rows;
}

// --- pkf presets -------------------------------------------------------------------

struct PkfPreset {
  std::string group;
  intgeo::Polytope k_body;
  intgeo::Polytope l_body;
  int group_samples;
  int translation_samples;
  int blocks;
};

std::optional<PkfPreset> pkf_preset(const std::string& name) {
  using intgeo::Polytope;
  if (name == "so7-cubes")
    return PkfPreset{"so7", Polytope::cube(7, 1.0), Polytope::cube(7, 1.0), 2000, 2000, 16};
  if (name == "so8-cubes")
    return PkfPreset{"so8", Polytope::cube(8, 1.0), Polytope::cube(8, 1.0), 2000, 2000, 16};
  if (name == "associative-coassociative")
    return PkfPreset{"g2", axis_unit_cube(7, {0, 1, 2}), axis_unit_cube(7, {3, 4, 5, 6}), 100000,
                     160, 16};
  if (name == "coassociative-negative")
    return PkfPreset{"g2", axis_unit_cube(7, {0, 1, 2}), axis_unit_cube(7, {2, 4, 5, 6}), 20000,
                     160, 16};
  if (name == "real-4-plane")
    return PkfPreset{"spin7", axis_unit_cube(8, {0, 2, 4, 6}), axis_unit_cube(8, {0, 2, 4, 6}),
                     150000, 200, 20};
  return std::nullopt;
}

std::string normalize_group(std::string g) {
  g = to_lower(g);
  if (g == "so" || g == "su")
    throw std::invalid_argument("group '" + g + "' needs an explicit dimension, e.g. " + g + "7");
  return g;
}

// --- contexts ----------------------------------------------------------------------

enum class Context { G2, Spin7, SU, SO };

Context parse_context(const std::string& s) {
  std::string c = to_lower(s);
  if (c == "g2") return Context::G2;
  if (c == "spin7") return Context::Spin7;
  if (c == "su") return Context::SU;
  if (c == "so") return Context::SO;
  throw std::invalid_argument("unknown context '" + s + "' (expected G2, SPIN7, SU, or SO)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intgeo: integral-geometry laboratory for invariant valuations on polytopes"};
  app.set_config("--config", "", "configuration file (key = value, with [subcommand] sections)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  long samples = 0;
  int workers = 1;
  std::string output;
  std::string format = "json";
  app.add_option("--seed", seed, "master RNG seed");
  app.add_option("--samples", samples, "sample-count override (0 = command default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--workers", workers, "worker threads for Monte Carlo commands")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", output, "report file path (default: stdout)");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));

  // check-identities
  auto* ci = app.add_subcommand("check-identities", "run the algebraic identity suite for a context");
  ci->fallthrough();
  std::string ci_context;
  double ci_tol = 0.0;
  int ci_dim = 7;
  ci->add_option("--context", ci_context, "G2, SPIN7, SU, or SO")->required();
  ci->add_option("--tol", ci_tol, "tolerance override for residual checks (0 = per-check default)");
  ci->add_option("--dim", ci_dim, "matrix dimension for the SO context")->check(CLI::Range(1, 8));

  // sample-diagnostics
  auto* sd = app.add_subcommand("sample-diagnostics", "certify and profile a Haar sampler");
  sd->fallthrough();
  std::string sd_context;
  int sd_dim = 0;
  intgeo::WalkConfig sd_walk;
  sd->add_option("--context", sd_context, "G2, SPIN7, SU, or SO")->required();
  sd->add_option("--dim", sd_dim, "matrix dimension for SO (default 7) / complex rank for SU (default 4)")
      ->check(CLI::Range(1, 8));
  sd->add_option("--walk-burn-in", sd_walk.burn_in, "walk steps before the first emission");
  sd->add_option("--walk-stride", sd_walk.stride, "walk steps between emissions");
  sd->add_option("--walk-step", sd_walk.step_scale, "walk step scale");
  sd->add_option("--certify-tol", sd_walk.certify_tol, "max allowed form-preservation residual");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "evaluate valuations on a convex body");
  ev->fallthrough();
  std::string ev_preset, ev_valuations;
  BodySpec ev_body;
  ev->add_option("--preset", ev_preset,
                 "body preset: associative-box, coassociative-box, negative-witness-box, real-4-plane-box");
  ev->add_option("--valuations", ev_valuations, "comma-separated valuation names (e.g. mu_3,nu_3_prime)");
  ev->add_option("--family", ev_body.family, "body family: box, cube, or simplex");
  ev->add_option("--center", ev_body.center, "box center coordinates");
  ev->add_option("--axes", ev_body.axes, "box axes, ';'-separated (basis tokens e0..e7 or vectors)");
  ev->add_option("--half-lengths", ev_body.half_lengths, "box half-lengths");
  ev->add_option("--vertices", ev_body.vertices, "simplex vertices, ';'-separated");
  ev->add_option("--dim", ev_body.dim, "cube dimension");
  ev->add_option("--side", ev_body.side, "cube side length");

  // pkf
  auto* pk = app.add_subcommand("pkf", "principal kinematic-formula experiment (MC vs closed form)");
  pk->fallthrough();
  std::string pk_group, pk_preset;
  int pk_translations = 0, pk_blocks = 0;
  double pk_margin = 0.05, pk_zgate = 3.0;
  bool pk_plain = false;
  BodySpec pk_k, pk_l;
  intgeo::WalkConfig pk_walk;
  pk->add_option("--group", pk_group, "motion group: so2..so8, su2..su4, g2, spin7");
  pk->add_option("--preset", pk_preset,
                 "experiment preset: so7-cubes, so8-cubes, associative-coassociative, "
                 "coassociative-negative, real-4-plane");
  pk->add_option("--translations", pk_translations, "translation samples per rotation");
  pk->add_option("--blocks", pk_blocks, "independent strata for the error estimate");
  pk->add_option("--margin", pk_margin, "relative padding on the declared translation box");
  pk->add_flag("--plain-translation", pk_plain, "sample the declared box instead of per-rotation support boxes");
  pk->add_option("--z-gate", pk_zgate, "pass threshold on |z|");
  pk->add_option("--k-family", pk_k.family, "body K family: box, cube, or simplex");
  pk->add_option("--k-center", pk_k.center, "body K box center");
  pk->add_option("--k-axes", pk_k.axes, "body K box axes (';'-separated)");
  pk->add_option("--k-half-lengths", pk_k.half_lengths, "body K box half-lengths");
  pk->add_option("--k-vertices", pk_k.vertices, "body K simplex vertices");
  pk->add_option("--k-dim", pk_k.dim, "body K cube dimension");
  pk->add_option("--k-side", pk_k.side, "body K cube side");
  pk->add_option("--l-family", pk_l.family, "body L family: box, cube, or simplex");
  pk->add_option("--l-center", pk_l.center, "body L box center");
  pk->add_option("--l-axes", pk_l.axes, "body L box axes (';'-separated)");
  pk->add_option("--l-half-lengths", pk_l.half_lengths, "body L box half-lengths");
  pk->add_option("--l-vertices", pk_l.vertices, "body L simplex vertices");
  pk->add_option("--l-dim", pk_l.dim, "body L cube dimension");
  pk->add_option("--l-side", pk_l.side, "body L cube side");
  pk->add_option("--walk-burn-in", pk_walk.burn_in, "walk steps before the first emission");
  pk->add_option("--walk-stride", pk_walk.stride, "walk steps between emissions");
  pk->add_option("--walk-step", pk_walk.step_scale, "walk step scale");
  pk->add_option("--certify-tol", pk_walk.certify_tol, "max allowed form-preservation residual");

  // rank-check
  auto* rk = app.add_subcommand("rank-check", "numerical rank of the invariant-valuation basis");
  rk->fallthrough();
  std::string rk_context;
  rk->add_option("--context", rk_context, "G2 or SPIN7")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::mt19937_64 rng(seed);
    ordered_json report;
    bool pass = true;
    std::string csv;

    if (app.got_subcommand(ci)) {
      Context ctx = parse_context(ci_context);
      long n = samples > 0 ? samples : 10000;
      double tol = ci_tol > 0.0 ? ci_tol : 1e-10;
      double tol_exact = ci_tol > 0.0 ? ci_tol : 1e-12;
      std::vector<CheckRow> rows;
      switch (ctx) {
        case Context::G2: rows = identity_checks_g2(n, tol, tol_exact, rng); break;
        case Context::Spin7: rows = identity_checks_spin7(n, tol, tol_exact, rng); break;
        case Context::SU: rows = identity_checks_su(n, tol, rng); break;
        case Context::SO: rows = identity_checks_so(ci_dim, n, tol_exact, rng); break;
      }
      pass = all_pass(rows);
      ordered_json config{{"context", ci_context}, {"samples", n}, {"seed", seed}};
      if (ctx == Context::SO) config["dim"] = ci_dim;
      if (ci_tol > 0.0) config["tol"] = ci_tol;
      report = make_report("check-identities", std::move(config), rows_to_json(rows), pass);
      csv = rows_to_csv(rows);
    } else if (app.got_subcommand(sd)) {
      Context ctx = parse_context(sd_context);
      long n = samples > 0 ? samples : 1000;
      std::vector<CheckRow> rows;
      ordered_json config{{"context", sd_context}, {"samples", n}, {"seed", seed}};
      if (ctx == Context::G2 || ctx == Context::Spin7) {
        rows = diagnostics_walk(ctx == Context::G2 ? "g2" : "spin7", n, sd_walk, rng);
        config["walk"] = ordered_json{{"burn_in", sd_walk.burn_in},
                                      {"stride", sd_walk.stride},
                                      {"step_scale", sd_walk.step_scale},
                                      {"certify_tol", sd_walk.certify_tol}};
      } else {
        int dim = sd_dim > 0 ? sd_dim : (ctx == Context::SO ? 7 : 4);
        rows = diagnostics_classical(ctx == Context::SO ? "so" : "su", dim, n, rng);
        config["dim"] = dim;
      }
      pass = all_pass(rows);
      report = make_report("sample-diagnostics", std::move(config), rows_to_json(rows), pass);
      csv = rows_to_csv(rows);
    } else if (app.got_subcommand(ev)) {
      intgeo::Polytope body = intgeo::Polytope::point(Eigen::VectorXd::Zero(1));
      std::string label, valuation_list = ev_valuations;
      if (!ev_preset.empty()) {
        auto preset = body_preset(ev_preset);
        if (!preset) throw std::invalid_argument("unknown body preset '" + ev_preset + "'");
        body = preset->first;
        label = ev_preset;
        if (valuation_list.empty()) valuation_list = preset->second;
      } else if (ev_body.defined()) {
        body = build_body(ev_body);
        label = to_lower(ev_body.family);
      } else {
        throw std::invalid_argument("evaluate requires --preset or an explicit body (--family ...)");
      }
      if (valuation_list.empty())
        throw std::invalid_argument("evaluate requires --valuations when no preset supplies them");
      std::vector<intgeo::ValuationId> ids;
      for (const std::string& name : split(valuation_list, ','))
        ids.push_back(intgeo::valuation_from_name(name));
      long n = samples > 0 ? samples : 1'000'000;
      ordered_json results = ordered_json::array();
      csv = "valuation,polytope,value,std_error\n";
      for (const auto& id : ids) {
        intgeo::ValuationResult r = intgeo::evaluate(id, body, rng, static_cast<int>(n));
        results.push_back(ordered_json{{"valuation", id.name()},
                                       {"polytope", label},
                                       {"value", r.value},
                                       {"std_error", r.std_error}});
        csv += id.name() + "," + label + "," + format_double(r.value) + "," +
               format_double(r.std_error) + "\n";
      }
      ordered_json config{{"polytope", intgeo::polytope_to_json(body)},
                          {"valuations", split(valuation_list, ',')},
                          {"angle_samples", n},
                          {"seed", seed}};
      if (!ev_preset.empty()) config["preset"] = ev_preset;
      report = make_report("evaluate", std::move(config), std::move(results), true);
    } else if (app.got_subcommand(pk)) {
      intgeo::PkfSettings s;
      std::optional<intgeo::Polytope> k_body, l_body;
      if (!pk_preset.empty()) {
        auto preset = pkf_preset(pk_preset);
        if (!preset) throw std::invalid_argument("unknown pkf preset '" + pk_preset + "'");
        s.group = preset->group;
        s.group_samples = preset->group_samples;
        s.translation_samples = preset->translation_samples;
        s.blocks = preset->blocks;
        k_body = preset->k_body;
        l_body = preset->l_body;
      }
      if (!pk_group.empty()) s.group = normalize_group(pk_group);
      if (samples > 0) s.group_samples = static_cast<int>(samples);
      if (pk_translations > 0) s.translation_samples = pk_translations;
      if (pk_blocks > 0) s.blocks = pk_blocks;
      if (pk_k.defined()) k_body = build_body(pk_k);
      if (pk_l.defined()) l_body = build_body(pk_l);
      if (!k_body || !l_body)
        throw std::invalid_argument("pkf requires --preset or explicit bodies (--k-family/--l-family ...)");
      if (s.group.empty()) throw std::invalid_argument("pkf requires --group or --preset");
      s.seed = seed;
      s.workers = workers;
      s.box_margin = pk_margin;
      s.plain_translation = pk_plain;
      s.walk = pk_walk;

      intgeo::PkfReport r = intgeo::run_experiment(*k_body, *l_body, s);
      pass = std::abs(r.z_score) <= pk_zgate;

      ordered_json block_means = ordered_json::array();
      for (double m : r.lhs.block_means) block_means.push_back(m);
      ordered_json classical_terms = ordered_json::array();
      for (Eigen::Index i = 0; i < r.rhs.classical_terms.size(); ++i)
        classical_terms.push_back(r.rhs.classical_terms(i));
      ordered_json results{
          {"lhs",
           ordered_json{{"value", r.lhs.value},
                        {"std_error", r.lhs.std_error},
                        {"declared_box_volume", r.lhs.declared_box_volume},
                        {"total_group_samples", r.lhs.total_group_samples},
                        {"block_means", std::move(block_means)}}},
          {"rhs",
           ordered_json{{"classical", r.rhs.classical},
                        {"exceptional", r.rhs.exceptional},
                        {"total", r.rhs.total},
                        {"std_error", r.rhs.std_error},
                        {"classical_terms", std::move(classical_terms)}}},
          {"z_score", r.z_score},
          {"z_gate", pk_zgate},
          {"pass", pass}};
      ordered_json config{{"group", s.group},
                          {"bodies",
                           ordered_json{{"k", intgeo::polytope_to_json(*k_body)},
                                        {"l", intgeo::polytope_to_json(*l_body)}}},
                          {"group_samples", s.group_samples},
                          {"translation_samples", s.translation_samples},
                          {"blocks", s.blocks},
                          {"seed", s.seed},
                          {"workers", s.workers},
                          {"box_margin", s.box_margin},
                          {"plain_translation", s.plain_translation},
                          {"z_gate", pk_zgate},
                          {"walk",
                           ordered_json{{"burn_in", s.walk.burn_in},
                                        {"stride", s.walk.stride},
                                        {"step_scale", s.walk.step_scale},
                                        {"certify_tol", s.walk.certify_tol}}}};
      if (!pk_preset.empty()) config["preset"] = pk_preset;
      report = make_report("pkf", std::move(config), std::move(results), pass);
      csv = "block,mean\n";
      for (std::size_t i = 0; i < r.lhs.block_means.size(); ++i)
        csv += std::to_string(i) + "," + format_double(r.lhs.block_means[i]) + "\n";
    } else if (app.got_subcommand(rk)) {
      Context ctx = parse_context(rk_context);
      if (ctx != Context::G2 && ctx != Context::Spin7)
        throw std::invalid_argument("rank-check supports contexts G2 and SPIN7");
      long n = samples > 0 ? samples : 200;
      intgeo::RankCheckResult r = intgeo::hadwiger_rank_check(
          ctx == Context::G2 ? intgeo::Ambient::G2 : intgeo::Ambient::Spin7,
          static_cast<int>(n), rng);
      pass = r.total == 10;
      ordered_json per_degree = ordered_json::array();
      csv = "degree,rank\n";
      for (std::size_t d = 0; d < r.per_degree_rank.size(); ++d) {
        per_degree.push_back(
            ordered_json{{"degree", d}, {"rank", r.per_degree_rank[d]}});
        csv += std::to_string(d) + "," + std::to_string(r.per_degree_rank[d]) + "\n";
      }
      ordered_json results{{"per_degree", std::move(per_degree)},
                           {"total", r.total},
                           {"expected", 10},
                           {"min_conditioning", r.min_conditioning},
                           {"pass", pass}};
      report = make_report("rank-check",
                           ordered_json{{"context", rk_context},
                                        {"samples_per_degree", n},
                                        {"seed", seed}},
                           std::move(results), pass);
    }

    write_text(output, format == "json" ? report.dump(2) + "\n" : csv);
    return pass ? 0 : 1;
  } catch (const intgeo::certification_error& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
