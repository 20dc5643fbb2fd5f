#include "ktensors/psd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace kt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotSquare: return "NotSquare";
    case ErrorCode::kNotPsd: return "NotPsd";
    case ErrorCode::kNotOrthonormal: return "NotOrthonormal";
    case ErrorCode::kNegativeValue: return "NegativeValue";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kEmptyFrameSet: return "EmptyFrameSet";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kSingularAfterRidge: return "SingularAfterRidge";
    case ErrorCode::kTooFewObservations: return "TooFewObservations";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyRecords: return "EmptyRecords";
    case ErrorCode::kInternal: return "Internal";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

constexpr double kPsdRelTol = 1e-10;

Eigen::SelfAdjointEigenSolver<Matrix> solve(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kConvergenceFailure, "symmetric eigensolver did not converge");
  }
  return es;
}

}  // namespace

PsdMatrix PsdMatrix::make(const Matrix& raw, bool clamp_negative) {
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    throw Error(ErrorCode::kNotSquare, "matrix must be square and non-empty");
  }
  if (!raw.allFinite()) {
    throw Error(ErrorCode::kNotPsd, "matrix has non-finite entries");
  }
  Matrix sym = 0.5 * (raw + raw.transpose());
  auto es = solve(sym);
  const Vector& ev = es.eigenvalues();
  const double radius = ev.cwiseAbs().maxCoeff();
  const double lowest = ev.minCoeff();
  if (lowest < -kPsdRelTol * radius) {
    throw Error(ErrorCode::kNotPsd,
                "smallest eigenvalue " + std::to_string(lowest) + " is below the PSD tolerance");
  }
  if (clamp_negative && lowest < 0.0) {
    Vector clamped = ev.cwiseMax(0.0);
    sym = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    sym = 0.5 * (sym + sym.transpose());
  }
  return PsdMatrix(std::move(sym));
}

PsdMatrix PsdMatrix::zero(int p) { return PsdMatrix(Matrix::Zero(p, p)); }
PsdMatrix PsdMatrix::identity(int p) { return PsdMatrix(Matrix::Identity(p, p)); }

OrthonormalFrame OrthonormalFrame::make(const Matrix& b) {
  if (b.rows() != b.cols() || b.rows() == 0) {
    throw Error(ErrorCode::kNotSquare, "frame must be square and non-empty");
  }
  OrthonormalFrame f{Matrix(b)};
  if (!b.allFinite() || f.orthonormality_error() >= kTolerance) {
    throw Error(ErrorCode::kNotOrthonormal, "frame columns are not orthonormal");
  }
  return f;
}

OrthonormalFrame OrthonormalFrame::identity(int p) {
  return OrthonormalFrame(Matrix::Identity(p, p));
}

double OrthonormalFrame::orthonormality_error() const {
  const auto p = b_.cols();
  return (b_.transpose() * b_ - Matrix::Identity(p, p)).norm();
}

OrthonormalFrame OrthonormalFrame::canonical_signs() const {
  Matrix out = b_;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      // strict comparison: first entry wins ties
      if (std::abs(out(i, j)) > best) {
        best = std::abs(out(i, j));
        arg = i;
      }
    }
    if (out(arg, j) < 0.0) out.col(j) = -out.col(j);
  }
  return OrthonormalFrame(std::move(out));
}

OrthonormalFrame OrthonormalFrame::canonical(const Vector& keys) const {
  if (keys.size() != b_.cols()) {
    throw Error(ErrorCode::kDimMismatch, "ordering keys must match frame width");
  }
  std::vector<int> order(static_cast<std::size_t>(keys.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys(a) > keys(b); });
  Matrix out(b_.rows(), b_.cols());
  for (std::size_t j = 0; j < order.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = b_.col(order[j]);
  }
  return OrthonormalFrame(std::move(out)).canonical_signs();
}

NonNegDiagonal::NonNegDiagonal(Vector values) : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_(i) >= 0.0)) {
      throw Error(ErrorCode::kNegativeValue, "diagonal entries must be non-negative");
    }
  }
}

EigenPair sym_eigen(const Matrix& symmetric) {
  if (symmetric.rows() != symmetric.cols()) {
    throw Error(ErrorCode::kNotSquare, "eigendecomposition needs a square matrix");
  }
  auto es = solve(symmetric);
  const Vector asc = es.eigenvalues();
  const Matrix& vec = es.eigenvectors();
  const auto p = asc.size();
  EigenPair out;
  out.values.resize(p);
  Matrix desc(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    out.values(j) = asc(p - 1 - j);
    desc.col(j) = vec.col(p - 1 - j);
  }
  // already descending, so only the sign convention remains
  out.vectors = OrthonormalFrame::make(desc).canonical_signs();
  return out;
}

EigenPair sym_eigen(const PsdMatrix& m) { return sym_eigen(m.matrix()); }

double frobenius_norm(const Matrix& m) { return m.norm(); }

OrthonormalFrame random_orthonormal(int p, Rng& rng) {
  if (p < 1) throw Error(ErrorCode::kInvalidConfig, "frame dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(p, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return OrthonormalFrame::make(q).canonical_signs();
}

PsdMatrix random_psd(int p, double lo, double hi, Rng& rng) {
  if (!(lo >= 0.0) || !(hi >= lo)) {
    throw Error(ErrorCode::kInvalidConfig, "eigenvalue range must satisfy 0 <= lo <= hi");
  }
  const OrthonormalFrame u = random_orthonormal(p, rng);
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector lambda(p);
  for (int j = 0; j < p; ++j) lambda(j) = lo == hi ? lo : unif(rng);
  const Matrix& b = u.matrix();
  return PsdMatrix::make(b * lambda.asDiagonal() * b.transpose(), true);
}

}  // namespace kt
