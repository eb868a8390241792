#pragma once

// Haar sampling on compact matrix groups: exact samplers for SO(n) and the
// real representation of SU(m), and a certified product-of-exponentials
// random walk for stabilizer groups of alternating forms.

#include <Eigen/Dense>
#include <complex>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "intgeo/common.hpp"
#include "intgeo/forms.hpp"

namespace intgeo {

inline Eigen::MatrixXd exp_skew(const Eigen::MatrixXd& a) { return a.exp(); }

class HaarSampler {
 public:
  virtual ~HaarSampler() = default;
  virtual int dim() const = 0;  // ambient dimension of the matrices
  virtual Eigen::MatrixXd sample(std::mt19937_64& rng) = 0;
  virtual std::string name() const = 0;
};

namespace detail {

// Orthonormalize an almost-orthogonal matrix by QR with positive R diagonal.
inline Eigen::MatrixXd reorthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m.cols(); ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace detail

// Exact Haar sampler on SO(n): sign-fixed QR of a Gaussian matrix gives Haar
// on O(n); a determinant-conditional column flip (right multiplication by a
// fixed reflection) maps the orientation-reversing component onto SO(n).
class SoSampler final : public HaarSampler {
 public:
  explicit SoSampler(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("SoSampler: n must be positive");
  }
  int dim() const override { return n_; }
  std::string name() const override { return "so" + std::to_string(n_); }
  Eigen::MatrixXd sample(std::mt19937_64& rng) override {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = g(rng);
    Eigen::MatrixXd q = detail::reorthonormalize(m);
    if (q.determinant() < 0) q.col(n_ - 1) = -q.col(n_ - 1);
    return q;
  }

 private:
  int n_;
};

// Realification of a complex m x m matrix acting on interleaved coordinates
// (x_1, y_1, ..., x_m, y_m) with J x_j = y_j.
inline Eigen::MatrixXd realify(const Eigen::MatrixXcd& m) {
  const int k = static_cast<int>(m.rows());
  Eigen::MatrixXd r(2 * k, 2 * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      r(2 * i, 2 * j) = m(i, j).real();
      r(2 * i, 2 * j + 1) = -m(i, j).imag();
      r(2 * i + 1, 2 * j) = m(i, j).imag();
      r(2 * i + 1, 2 * j + 1) = m(i, j).real();
    }
  return r;
}

// Exact Haar sampler on SU(m), returned in the real representation on R^{2m}.
// Phase-fixed complex QR gives Haar on U(m); dividing the first column by the
// determinant phase projects to Haar on SU(m) (the law is invariant under
// left multiplication by SU(m), which characterizes Haar).
class SuSampler final : public HaarSampler {
 public:
  explicit SuSampler(int m) : m_(m) {
    if (m < 1) throw std::invalid_argument("SuSampler: m must be positive");
  }
  int dim() const override { return 2 * m_; }
  std::string name() const override { return "su" + std::to_string(m_); }
  Eigen::MatrixXd sample(std::mt19937_64& rng) override { return realify(sample_complex(rng)); }

  Eigen::MatrixXcd sample_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) m(i, j) = std::complex<double>(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m_; ++j) {
      std::complex<double> d = r(j, j);
      q.col(j) *= d / std::abs(d);
    }
    std::complex<double> det = q.determinant();
    q.col(0) /= det;
    return q;
  }

 private:
  int m_;
};

struct WalkConfig {
  int burn_in = 200;
  int stride = 20;
  double step_scale = 0.5;
  double certify_tol = 1e-9;
};

// Haar sampling on the stabilizer group of a family of alternating forms via
// a product-of-exponentials random walk in the group. Each emitted sample is
// certified to preserve every defining form; certification failures throw.
// The walk is an ergodic, symmetric Markov chain on the compact group whose
// unique stationary law is Haar; burn-in and stride control mixing.
class LieWalkSampler final : public HaarSampler {
 public:
  LieWalkSampler(std::string group_name, std::vector<AlternatingForm> forms, WalkConfig config = {})
      : name_(std::move(group_name)), forms_(std::move(forms)), config_(config) {
    if (forms_.empty()) throw std::invalid_argument("LieWalkSampler: need at least one defining form");
    n_ = forms_.front().dim();
    for (const auto& f : forms_)
      if (f.dim() != n_) throw std::invalid_argument("LieWalkSampler: forms live in different dimensions");
    algebra_ = annihilator_algebra(forms_, GramForm{Eigen::MatrixXd::Identity(n_, n_)});
    if (algebra_.empty()) throw std::invalid_argument("LieWalkSampler: stabilizer algebra is trivial");
    state_ = Eigen::MatrixXd::Identity(n_, n_);
  }

  int dim() const override { return n_; }
  std::string name() const override { return name_; }
  int algebra_dimension() const { return static_cast<int>(algebra_.size()); }
  const WalkConfig& config() const { return config_; }

  Eigen::MatrixXd sample(std::mt19937_64& rng) override {
    if (!burned_in_) {
      for (int i = 0; i < config_.burn_in; ++i) step(rng);
      burned_in_ = true;
    } else {
      for (int i = 0; i < config_.stride; ++i) step(rng);
    }
    certify(state_);
    return state_;
  }

  // Largest deviation of the pulled-back defining forms from themselves.
  double certification_residual(const Eigen::MatrixXd& g) const {
    double worst = 0.0;
    for (const auto& f : forms_) worst = std::max(worst, (pullback(f, g) - f).norm());
    return worst;
  }

 private:
  void step(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& x : algebra_) a += g(rng) * x;
    state_ = detail::reorthonormalize(state_ * exp_skew(config_.step_scale * a));
  }

  void certify(const Eigen::MatrixXd& g) const {
    double res = certification_residual(g);
    if (!(res < config_.certify_tol)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "residual %.3e (tolerance %.3e)", res, config_.certify_tol);
      throw certification_error(name_ + " sample failed form-preservation certification: " + buf);
    }
  }

  std::string name_;
  std::vector<AlternatingForm> forms_;
  WalkConfig config_;
  int n_ = 0;
  std::vector<Eigen::MatrixXd> algebra_;
  Eigen::MatrixXd state_;
  bool burned_in_ = false;
};

inline std::unique_ptr<LieWalkSampler> g2_sampler(WalkConfig config = {}) {
  return std::make_unique<LieWalkSampler>("g2", std::vector<AlternatingForm>{associative_form()}, config);
}

inline std::unique_ptr<LieWalkSampler> spin7_sampler(WalkConfig config = {}) {
  return std::make_unique<LieWalkSampler>("spin7", std::vector<AlternatingForm>{cayley_form()}, config);
}

// Named factory: "soN" (N >= 1), "suM" (M >= 1, acts on R^{2M}), "g2", "spin7".
inline std::unique_ptr<HaarSampler> make_sampler(const std::string& name, WalkConfig config = {}) {
  if (name == "g2") return g2_sampler(config);
  if (name == "spin7") return spin7_sampler(config);
  if (name.rfind("so", 0) == 0) {
    int n = std::stoi(name.substr(2));
    return std::make_unique<SoSampler>(n);
  }
  if (name.rfind("su", 0) == 0) {
    int m = std::stoi(name.substr(2));
    return std::make_unique<SuSampler>(m);
  }
  throw std::invalid_argument("make_sampler: unknown group '" + name + "'");
}

}  // namespace intgeo
