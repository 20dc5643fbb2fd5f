#pragma once

#include <cstddef>
#include <span>

#include "ktensors/psd.hpp"

namespace kt {

struct ProjectionResult {
  NonNegDiagonal index;  // diag(B^T psi B)
  PsdMatrix projected;   // B diag(index) B^T
  double residual = 0.0; // ||psi - projected||_F
};

/// B^T psi B, symmetrized. Throws kDimMismatch.
Matrix rotate_into(const PsdMatrix& psi, const OrthonormalFrame& b);

/// Sum of squared off-diagonal entries of a square matrix.
double off_diagonal_energy(const Matrix& m);

/// The non-negative diagonal closest to psi once rotated back by B, which
/// is the diagonal of B^T psi B.
NonNegDiagonal projection_index(const PsdMatrix& psi, const OrthonormalFrame& b);

ProjectionResult project(const PsdMatrix& psi, const OrthonormalFrame& b);

/// ||psi - P_B(psi)||_F, from the off-diagonal part of B^T psi B.
double residual_distance(const PsdMatrix& psi, const OrthonormalFrame& b);
double residual_distance_sq(const PsdMatrix& psi, const OrthonormalFrame& b);

struct NearestFrame {
  std::size_t cluster = 0;
  double distance = 0.0;
};

/// Frame with the smallest residual; ties go to the lowest index.
/// Throws kEmptyFrameSet or kDimMismatch.
NearestFrame min_distance_to_set(const PsdMatrix& psi, std::span<const OrthonormalFrame> frames);

}  // namespace kt
