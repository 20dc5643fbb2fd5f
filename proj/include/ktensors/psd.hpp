#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "ktensors/error.hpp"

namespace kt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Mixes a master seed with a stream index (splitmix64 finalizer).
/// Used everywhere a run needs an independent, order-free RNG stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// A symmetric positive semi-definite matrix. Symmetrized on construction;
/// the smallest eigenvalue must be >= -1e-10 * spectral radius.
class PsdMatrix {
 public:
  PsdMatrix() = default;

  /// Throws kNotSquare or kNotPsd. With `clamp_negative`, eigenvalues inside
  /// the tolerance band are clamped to zero and the matrix rebuilt.
  static PsdMatrix make(const Matrix& raw, bool clamp_negative = false);

  /// Zero matrix of size p.
  static PsdMatrix zero(int p);
  static PsdMatrix identity(int p);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  explicit PsdMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

inline PsdMatrix make_psd(const Matrix& raw, bool clamp_negative = false) {
  return PsdMatrix::make(raw, clamp_negative);
}

/// A full p-frame: p x p with orthonormal columns.
class OrthonormalFrame {
 public:
  static constexpr double kTolerance = 1e-10;

  OrthonormalFrame() = default;

  /// Throws kNotSquare or kNotOrthonormal (||B^T B - I||_F >= 1e-10).
  static OrthonormalFrame make(const Matrix& b);
  static OrthonormalFrame identity(int p);

  int dim() const { return static_cast<int>(b_.rows()); }
  const Matrix& matrix() const { return b_; }
  auto column(int j) const { return b_.col(j); }

  /// Flips each column so its largest-magnitude entry is positive
  /// (first such entry on ties).
  OrthonormalFrame canonical_signs() const;

  /// Reorders columns by `keys` descending (stable), then applies the
  /// sign convention.
  OrthonormalFrame canonical(const Vector& keys) const;

  double orthonormality_error() const;

 private:
  explicit OrthonormalFrame(Matrix b) : b_(std::move(b)) {}
  Matrix b_;
};

class NonNegDiagonal {
 public:
  NonNegDiagonal() = default;
  /// Throws kNegativeValue when any entry is < 0.
  explicit NonNegDiagonal(Vector values);

  int dim() const { return static_cast<int>(values_.size()); }
  const Vector& values() const { return values_; }
  double operator[](int i) const { return values_(i); }

 private:
  Vector values_;
};

struct EigenPair {
  Vector values;  // descending
  OrthonormalFrame vectors;
};

/// Eigendecomposition of a PSD matrix; values descending, vectors in
/// canonical sign form. Equal eigenvalues keep the solver's order.
EigenPair sym_eigen(const PsdMatrix& m);

/// Same, for any symmetric matrix (only the lower triangle is read).
EigenPair sym_eigen(const Matrix& symmetric);

double frobenius_norm(const Matrix& m);
inline double frobenius_norm(const PsdMatrix& m) { return frobenius_norm(m.matrix()); }

/// Haar-distributed frame: QR of a standard Gaussian matrix with the R
/// diagonal sign correction, followed by the column sign convention.
OrthonormalFrame random_orthonormal(int p, Rng& rng);

/// U diag(lambda) U^T with U Haar and lambda ~ U[lo, hi].
PsdMatrix random_psd(int p, double lo, double hi, Rng& rng);

/// Symmetric function of a symmetric matrix through its eigenvalues.
template <class F>
Matrix spectral_apply(const Matrix& symmetric, F&& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kConvergenceFailure, "symmetric eigensolver did not converge");
  }
  Vector mapped = es.eigenvalues().unaryExpr(f);
  Matrix out = es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace kt
