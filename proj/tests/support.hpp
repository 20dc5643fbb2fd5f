#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ktensors/psd.hpp"

namespace kt::testing {

inline Matrix random_symmetric(int p, Rng& rng) {
  std::normal_distribution<double> gauss;
  Matrix a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = gauss(rng);
  return 0.5 * (a + a.transpose());
}

// Full-rank Gaussian matrix, well away from singular with high probability.
inline Matrix random_invertible(int p, Rng& rng) {
  std::normal_distribution<double> gauss;
  Matrix m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = gauss(rng);
  return m + 2.0 * Matrix::Identity(p, p);
}

inline Matrix rotation2(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

// ||psi - B diag(d) B^T||_F^2 evaluated the long way.
inline double reconstruction_error_sq(const Matrix& psi, const Matrix& b, const Vector& d) {
  return (psi - b * d.asDiagonal() * b.transpose()).squaredNorm();
}

// Projected gradient descent on d >= 0 with central-difference gradients; knows
// nothing about the closed form of the minimiser.
inline Vector numeric_projection_index(const Matrix& psi, const Matrix& b) {
  const int p = static_cast<int>(psi.rows());
  Vector d = Vector::Ones(p);
  const double h = 1e-4;
  for (int it = 0; it < 400; ++it) {
    Vector grad(p);
    for (int j = 0; j < p; ++j) {
      Vector up = d, down = d;
      up(j) += h;
      down(j) -= h;
      grad(j) = (reconstruction_error_sq(psi, b, up) - reconstruction_error_sq(psi, b, down)) / (2 * h);
    }
    Vector next = (d - 0.25 * grad).cwiseMax(0.0);
    const double step = (next - d).norm();
    d = next;
    if (step < 1e-14) break;
  }
  return d;
}

// Adjusted Rand index from explicit enumeration of all unordered pairs.
inline double pair_counting_ari(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double both = 0, in_a = 0, in_b = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      both += (sa && sb) ? 1 : 0;
      in_a += sa ? 1 : 0;
      in_b += sb ? 1 : 0;
      pairs += 1;
    }
  }
  const double expected = in_a * in_b / pairs;
  const double max_index = 0.5 * (in_a + in_b);
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

// Accuracy by trying every relabelling of pred.
inline double permutation_accuracy(const std::vector<int>& pred, const std::vector<int>& truth, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
  double best = 0;
  do {
    double hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      hit += perm[static_cast<std::size_t>(pred[i])] == truth[i] ? 1 : 0;
    }
    best = std::max(best, hit / static_cast<double>(pred.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline bool non_increasing(const std::vector<double>& trace, double rel_slack) {
  for (std::size_t t = 1; t < trace.size(); ++t) {
    if (trace[t] > trace[t - 1] + rel_slack * std::max(1.0, std::abs(trace[t - 1]))) return false;
  }
  return true;
}

}  // namespace kt::testing
