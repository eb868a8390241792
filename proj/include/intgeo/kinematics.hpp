#pragma once

// Principal kinematic formulas: Monte Carlo estimation of the mean mutual
// volume E_g[ vol(K + (-gL)) ] over a compact group of rotations with
// translations integrated in closed form against Lebesgue measure, and the
// matching right-hand sides built from intrinsic volumes (all groups) plus
// exceptional correction terms for the two special stabilizer groups.

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "intgeo/common.hpp"
#include "intgeo/groups.hpp"
#include "intgeo/polytope.hpp"
#include "intgeo/valuations.hpp"

namespace intgeo {

struct PkfSettings {
  std::string group = "so7";
  int group_samples = 4096;      // total rotations across all blocks
  int translation_samples = 64;  // Latin-hypercube points per rotation
  int blocks = 16;               // independent strata for the error estimate
  std::uint64_t seed = 1;
  int workers = 1;
  double box_margin = 0.05;        // padding on the declared translation box
  bool plain_translation = false;  // sample the declared box instead of the
                                   // per-rotation certified support box
  WalkConfig walk;
};

struct PkfLhsResult {
  double value = 0.0;
  double std_error = 0.0;             // from the spread of the block means
  double declared_box_volume = 0.0;   // conservative rotation-invariant domain
  std::vector<double> block_means;    // one per stratum, in block order
  long total_group_samples = 0;
};

struct PkfRhsResult {
  double classical = 0.0;
  double exceptional = 0.0;
  double total = 0.0;
  double std_error = 0.0;
  Eigen::VectorXd classical_terms;  // contribution of each homogeneity degree
};

struct PkfReport {
  PkfLhsResult lhs;
  PkfRhsResult rhs;
  double z_score = 0.0;
};

inline double z_score(const PkfLhsResult& lhs, const PkfRhsResult& rhs) {
  double se = std::sqrt(lhs.std_error * lhs.std_error + rhs.std_error * rhs.std_error);
  if (se == 0.0) return 0.0;
  return (lhs.value - rhs.total) / se;
}

namespace detail {

// Latin hypercube sample: one stratified coordinate per dimension and point.
inline Eigen::MatrixXd latin_hypercube(int points, int dims, std::mt19937_64& rng) {
  Eigen::MatrixXd x(dims, points);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> perm(static_cast<size_t>(points));
  for (int d = 0; d < dims; ++d) {
    for (int i = 0; i < points; ++i) perm[static_cast<size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < points; ++i) x(d, i) = (perm[static_cast<size_t>(i)] + unif(rng)) / points;
  }
  return x;
}

}  // namespace detail

// Monte Carlo estimate of E_g[ vol(K + (-gL)) ]. The translation integral is
// estimated per rotation by uniform sampling of a box that certifiably
// contains the difference body: its frame comes from the rotated generator
// directions and its extents from exact support-function evaluations. With
// `plain_translation` the rotation-independent declared box is sampled
// instead (slower convergence, used to cross-check the restriction). Blocks
// are independently seeded strata, so the result is independent of the
// worker count and the error bar is the empirical one across blocks.
inline PkfLhsResult pkf_lhs(const Polytope& k_body, const Polytope& l_body, const PkfSettings& s) {
  const int n = k_body.ambient_dim();
  if (l_body.ambient_dim() != n) throw std::invalid_argument("pkf_lhs: ambient dimensions differ");
  if (s.blocks < 2) throw std::invalid_argument("pkf_lhs: need at least two blocks for an error estimate");
  if (s.group_samples < s.blocks) throw std::invalid_argument("pkf_lhs: fewer rotations than blocks");
  {
    auto probe = make_sampler(s.group, s.walk);
    if (probe->dim() != n) throw std::invalid_argument("pkf_lhs: group acts in the wrong dimension");
  }

  const double reach = k_body.bounding_radius() + l_body.bounding_radius();
  const double declared_half = reach * (1.0 + s.box_margin) + 1e-12;
  const double declared_volume = std::pow(2.0 * declared_half, n);

  // generator directions of both bodies; rotated copies frame the support box
  std::function<Eigen::MatrixXd(const Polytope&)> generators = [&](const Polytope& p) -> Eigen::MatrixXd {
    switch (p.kind()) {
      case PolytopeKind::Box:
        return p.box_frame();
      case PolytopeKind::Simplex: {
        Eigen::MatrixXd v = p.simplex_vertices();
        Eigen::MatrixXd g(v.rows(), v.cols() - 1);
        for (long j = 1; j < v.cols(); ++j) g.col(j - 1) = v.col(j) - v.col(0);
        return g;
      }
      default: {
        Eigen::MatrixXd ga = generators(p.product_first());
        Eigen::MatrixXd gb = generators(p.product_second());
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p.ambient_dim(), ga.cols() + gb.cols());
        g.topLeftCorner(ga.rows(), ga.cols()) = ga;
        g.bottomRightCorner(gb.rows(), gb.cols()) = gb;
        return p.product_rotation() * g;
      }
    }
  };
  Eigen::MatrixXd gen_k = generators(k_body);
  Eigen::MatrixXd gen_l = generators(l_body);

  const int blocks = s.blocks;
  std::vector<double> block_means(static_cast<size_t>(blocks), 0.0);
  std::atomic<int> next_block{0};

  auto run_block = [&](int b) {
    std::mt19937_64 rng(split_seed(s.seed, static_cast<std::uint64_t>(b)));
    auto sampler = make_sampler(s.group, s.walk);
    const int per_block = s.group_samples / blocks + (b < s.group_samples % blocks ? 1 : 0);
    const int nt = s.translation_samples;
    CompensatedSum acc;
    Eigen::MatrixXd frame_gen(n, gen_k.cols() + gen_l.cols());
    Eigen::VectorXd lo(n), hi(n), t(n);
    for (int i = 0; i < per_block; ++i) {
      Eigen::MatrixXd g = sampler->sample(rng);
      Polytope gl = l_body.transformed(g, Eigen::VectorXd::Zero(n));
      double box_volume;
      Eigen::MatrixXd frame;
      if (s.plain_translation) {
        frame = Eigen::MatrixXd::Identity(n, n);
        lo.setConstant(-declared_half);
        hi.setConstant(declared_half);
        box_volume = declared_volume;
      } else {
        frame_gen.leftCols(gen_k.cols()) = gen_k;
        frame_gen.rightCols(gen_l.cols()) = g * gen_l;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame_gen);
        frame = qr.householderQ();
        box_volume = 1.0;
        for (int d = 0; d < n; ++d) {
          // exact support of the difference body K + (-gL) along the axis
          hi(d) = k_body.support(frame.col(d)) + gl.support(-frame.col(d));
          lo(d) = -(k_body.support(-frame.col(d)) + gl.support(frame.col(d)));
          box_volume *= std::max(hi(d) - lo(d), 0.0);
        }
      }
      if (box_volume <= 0.0) continue;  // lower-dimensional difference body
      Eigen::MatrixXd u = detail::latin_hypercube(nt, n, rng);
      long hits = 0;
      for (int j = 0; j < nt; ++j) {
        t.noalias() = frame * (lo + (hi - lo).cwiseProduct(u.col(j)));
        if (intersects(k_body, gl, t)) ++hits;
      }
      acc.add(box_volume * static_cast<double>(hits) / nt);
    }
    block_means[static_cast<size_t>(b)] = per_block > 0 ? acc.value() / per_block : 0.0;
  };

  auto worker = [&]() {
    while (true) {
      int b = next_block.fetch_add(1);
      if (b >= blocks) break;
      run_block(b);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::max(1, s.workers); ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  PkfLhsResult out;
  out.block_means = block_means;
  out.declared_box_volume = declared_volume;
  out.total_group_samples = s.group_samples;
  CompensatedSum mean;
  for (double m : block_means) mean.add(m);
  out.value = mean.value() / blocks;
  double var = 0.0;
  for (double m : block_means) var += (m - out.value) * (m - out.value);
  out.std_error = std::sqrt(var / (blocks - 1.0) / blocks);
  return out;
}

// Right-hand side of the principal kinematic formula for the given group:
// the classical intrinsic-volume pairing for every group, plus the
// exceptional correction for the two special stabilizers.
inline PkfRhsResult pkf_rhs(const Polytope& k_body, const Polytope& l_body, const std::string& group,
                            std::mt19937_64& rng, int angle_samples = 1'000'000) {
  const int n = k_body.ambient_dim();
  if (l_body.ambient_dim() != n) throw std::invalid_argument("pkf_rhs: ambient dimensions differ");
  PkfRhsResult out;
  out.classical_terms = Eigen::VectorXd::Zero(n + 1);

  IntrinsicVolumes mk = intrinsic_volumes(k_body, rng, angle_samples);
  IntrinsicVolumes ml = intrinsic_volumes(l_body, rng, angle_samples);
  double var = 0.0;
  CompensatedSum classical;
  for (int k = 0; k <= n; ++k) {
    double c = (unit_ball_volume(k) * unit_ball_volume(n - k) / unit_ball_volume(n)) /
               static_cast<double>(binomial(n, k));
    double term = c * mk.values(k) * ml.values(n - k);
    out.classical_terms(k) = term;
    classical.add(term);
    var += c * c *
           (mk.std_errors(k) * mk.std_errors(k) * ml.values(n - k) * ml.values(n - k) +
            mk.values(k) * mk.values(k) * ml.std_errors(n - k) * ml.std_errors(n - k));
  }
  out.classical = classical.value();

  if (group == "g2") {
    if (n != 7) throw std::invalid_argument("pkf_rhs: the 7-dimensional stabilizer needs dimension 7");
    ValuationResult k3 = evaluate(ValuationId::nu3(true), k_body, rng, angle_samples);
    ValuationResult k4 = evaluate(ValuationId::nu4(true), k_body, rng, angle_samples);
    ValuationResult l3 = evaluate(ValuationId::nu3(true), l_body, rng, angle_samples);
    ValuationResult l4 = evaluate(ValuationId::nu4(true), l_body, rng, angle_samples);
    const double c = 1.0 / 512.0;
    out.exceptional = c * (k3.value * l4.value + k4.value * l3.value);
    var += c * c *
           (k3.std_error * k3.std_error * l4.value * l4.value + k3.value * k3.value * l4.std_error * l4.std_error +
            k4.std_error * k4.std_error * l3.value * l3.value + k4.value * k4.value * l3.std_error * l3.std_error);
  } else if (group == "spin7") {
    if (n != 8) throw std::invalid_argument("pkf_rhs: the 8-dimensional stabilizer needs dimension 8");
    ValuationResult ke = evaluate(ValuationId::eta(true), k_body, rng, angle_samples);
    ValuationResult le = evaluate(ValuationId::eta(true), l_body, rng, angle_samples);
    const double c = 3.0 / 5040.0;
    out.exceptional = c * ke.value * le.value;
    var += c * c *
           (ke.std_error * ke.std_error * le.value * le.value + ke.value * ke.value * le.std_error * le.std_error);
  }

  out.total = out.classical + out.exceptional;
  out.std_error = std::sqrt(var);
  return out;
}

inline PkfReport run_experiment(const Polytope& k_body, const Polytope& l_body, const PkfSettings& s) {
  PkfReport report;
  report.lhs = pkf_lhs(k_body, l_body, s);
  std::mt19937_64 rng(split_seed(s.seed, 0x9e3779b97f4a7c15ULL));
  report.rhs = pkf_rhs(k_body, l_body, s.group, rng);
  report.z_score = z_score(report.lhs, report.rhs);
  return report;
}

}  // namespace intgeo
