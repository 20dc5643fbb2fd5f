#include "ktensors/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kt {

namespace {

void check_dims(const PsdMatrix& psi, const OrthonormalFrame& b) {
  if (psi.dim() != b.dim()) {
    throw Error(ErrorCode::kDimMismatch, "matrix dim " + std::to_string(psi.dim()) +
                                             " does not match frame dim " + std::to_string(b.dim()));
  }
}

// Quadratic forms of a PSD matrix can land slightly below zero; anything
// within the PSD tolerance band of the input is float noise.
Vector clamped_diagonal(const Matrix& rotated, const PsdMatrix& psi) {
  Vector d = rotated.diagonal();
  const double slack = std::max(1e-12, 1e-9 * psi.matrix().norm());
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d(j) < 0.0) {
      if (d(j) < -slack) {
        throw Error(ErrorCode::kInternal, "projection index has a negative entry beyond tolerance");
      }
      d(j) = 0.0;
    }
  }
  return d;
}

}  // namespace

Matrix rotate_into(const PsdMatrix& psi, const OrthonormalFrame& b) {
  check_dims(psi, b);
  Matrix t = b.matrix().transpose() * psi.matrix() * b.matrix();
  return 0.5 * (t + t.transpose());
}

double off_diagonal_energy(const Matrix& m) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j) s += m(i, j) * m(i, j);
    }
  }
  return s;
}

NonNegDiagonal projection_index(const PsdMatrix& psi, const OrthonormalFrame& b) {
  return NonNegDiagonal(clamped_diagonal(rotate_into(psi, b), psi));
}

ProjectionResult project(const PsdMatrix& psi, const OrthonormalFrame& b) {
  const Matrix t = rotate_into(psi, b);
  NonNegDiagonal index(clamped_diagonal(t, psi));
  const Matrix& bm = b.matrix();
  Matrix projected = bm * index.values().asDiagonal() * bm.transpose();
  return ProjectionResult{std::move(index), PsdMatrix::make(projected, true),
                          std::sqrt(off_diagonal_energy(t))};
}

double residual_distance_sq(const PsdMatrix& psi, const OrthonormalFrame& b) {
  return off_diagonal_energy(rotate_into(psi, b));
}

double residual_distance(const PsdMatrix& psi, const OrthonormalFrame& b) {
  return std::sqrt(residual_distance_sq(psi, b));
}

NearestFrame min_distance_to_set(const PsdMatrix& psi, std::span<const OrthonormalFrame> frames) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyFrameSet, "no frames to compare against");
  NearestFrame best{0, 0.0};
  double best_sq = 0.0;
  for (std::size_t h = 0; h < frames.size(); ++h) {
    const double d = residual_distance_sq(psi, frames[h]);
    if (h == 0 || d < best_sq) {
      best_sq = d;
      best.cluster = h;
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

}  // namespace kt
