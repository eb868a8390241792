#pragma once

// Shared test utilities: independent brute-force oracles for multilinear
// evaluation (no shared code with the library's coefficient-level algebra
// beyond the coefficient layout itself), plus small statistics helpers.

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <vector>

#include "intgeo/forms.hpp"

namespace testutil {

// Fully antisymmetrized evaluation of a product of forms on a list of vectors
// via the shuffle expansion. Each factor is evaluated by its own determinant
// sum. Used as the independent oracle for wedge products.
inline double shuffle_eval(const std::vector<const intgeo::AlternatingForm*>& factors,
                           const Eigen::MatrixXd& vectors) {
  int total = 0;
  for (auto* f : factors) total += f->degree();
  if (total != vectors.cols()) throw std::invalid_argument("shuffle_eval: arity mismatch");

  std::vector<int> assign(static_cast<std::size_t>(total));  // vector index -> factor id
  // iterate over all ordered set partitions with sorted blocks (shuffles)
  std::vector<int> perm(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) perm[static_cast<std::size_t>(i)] = i;

  // enumerate multiset permutations of factor labels
  std::vector<int> labels;
  for (std::size_t f = 0; f < factors.size(); ++f)
    for (int j = 0; j < factors[f]->degree(); ++j) labels.push_back(static_cast<int>(f));
  std::sort(labels.begin(), labels.end());

  double sum = 0.0;
  do {
    // vectors assigned to factor f, in their original order
    // parity of the shuffle: count inversions of the label sequence realized
    // by picking positions in increasing order per factor
    std::vector<std::vector<int>> blocks(factors.size());
    for (int pos = 0; pos < total; ++pos) blocks[static_cast<std::size_t>(labels[static_cast<std::size_t>(pos)])].push_back(pos);
    // permutation sending (block_0 | block_1 | ...) order back to 0..total-1
    std::vector<int> order;
    for (auto& b : blocks)
      for (int p : b) order.push_back(p);
    int inv = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = i + 1; j < order.size(); ++j)
        if (order[i] > order[j]) ++inv;
    double term = (inv % 2) ? -1.0 : 1.0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      Eigen::MatrixXd sel(vectors.rows(), factors[f]->degree());
      for (int j = 0; j < factors[f]->degree(); ++j)
        sel.col(j) = vectors.col(blocks[f][static_cast<std::size_t>(j)]);
      term *= intgeo::eval(*factors[f], sel);
    }
    sum += term;
  } while (std::next_permutation(labels.begin(), labels.end()));
  return sum;
}

inline Eigen::VectorXd random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v.normalized();
}

inline Eigen::MatrixXd random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    double fa = static_cast<double>(i) / static_cast<double>(a.size());
    double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

// 1% critical value for the two-sample KS test.
inline double ks_critical_1pct(std::size_t m, std::size_t n) {
  return 1.628 * std::sqrt((static_cast<double>(m) + static_cast<double>(n)) /
                           (static_cast<double>(m) * static_cast<double>(n)));
}

}  // namespace testutil
