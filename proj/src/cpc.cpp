#include "ktensors/cpc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ktensors/projection.hpp"

namespace kt {

namespace {

void check_sample(std::span<const PsdMatrix> sample) {
  if (sample.empty()) throw Error(ErrorCode::kEmptySample, "sample is empty");
  const int p = sample.front().dim();
  for (const auto& m : sample) {
    if (m.dim() != p) throw Error(ErrorCode::kDimMismatch, "sample matrices differ in dimension");
  }
}

void check_frame(std::span<const PsdMatrix> sample, const OrthonormalFrame& b) {
  check_sample(sample);
  if (b.dim() != sample.front().dim()) {
    throw Error(ErrorCode::kDimMismatch, "frame does not match sample dimension");
  }
}

std::vector<Matrix> rotated_sample(std::span<const PsdMatrix> sample, const OrthonormalFrame& b) {
  std::vector<Matrix> t;
  t.reserve(sample.size());
  for (const auto& m : sample) t.push_back(rotate_into(m, b));
  return t;
}

double objective_of(const std::vector<Matrix>& t) {
  double s = 0.0;
  for (const auto& m : t) s += off_diagonal_energy(m);
  return s / static_cast<double>(t.size());
}

double stationarity_of(const std::vector<Matrix>& t) {
  const Eigen::Index p = t.front().rows();
  double total = 0.0;
  for (Eigen::Index l = 0; l < p; ++l) {
    for (Eigen::Index m = l + 1; m < p; ++m) {
      double g = 0.0;
      for (const auto& ti : t) g += (ti(l, l) - ti(m, m)) * ti(l, m);
      total += g * g;
    }
  }
  return std::sqrt(total) / static_cast<double>(t.size());
}

// Rotate columns (l, m) of the frame by angle theta and update every
// rotated sample member in place: T <- G^T T G on rows/cols l, m.
void apply_rotation(Matrix& frame, std::vector<Matrix>& t, Eigen::Index l, Eigen::Index m,
                    double c, double s) {
  const Vector bl = frame.col(l);
  const Vector bm = frame.col(m);
  frame.col(l) = c * bl + s * bm;
  frame.col(m) = -s * bl + c * bm;
  for (auto& ti : t) {
    const Vector rl = ti.row(l).transpose();
    const Vector rm = ti.row(m).transpose();
    ti.row(l) = (c * rl + s * rm).transpose();
    ti.row(m) = (-s * rl + c * rm).transpose();
    const Vector cl = ti.col(l);
    const Vector cm = ti.col(m);
    ti.col(l) = c * cl + s * cm;
    ti.col(m) = -s * cl + c * cm;
  }
}

Vector mean_diagonal(const std::vector<Matrix>& t) {
  Vector d = Vector::Zero(t.front().rows());
  for (const auto& ti : t) d += ti.diagonal();
  return d / static_cast<double>(t.size());
}

}  // namespace

double cpc_objective(std::span<const PsdMatrix> sample, const OrthonormalFrame& b) {
  check_frame(sample, b);
  double s = 0.0;
  for (const auto& m : sample) s += residual_distance_sq(m, b);
  return s / static_cast<double>(sample.size());
}

double stationarity_residual(std::span<const PsdMatrix> sample, const OrthonormalFrame& b) {
  check_frame(sample, b);
  return stationarity_of(rotated_sample(sample, b));
}

CpcSolution fast_cpc(std::span<const PsdMatrix> sample) {
  check_sample(sample);
  Matrix omega = Matrix::Zero(sample.front().dim(), sample.front().dim());
  for (const auto& m : sample) omega += m.matrix();
  EigenPair eig = sym_eigen(omega);
  CpcSolution out;
  out.frame = eig.vectors;
  const auto t = rotated_sample(sample, out.frame);
  out.objective = objective_of(t);
  out.stationarity_residual = stationarity_of(t);
  out.iterations = 1;
  out.converged = true;
  out.objective_trace = {out.objective};
  return out;
}

CpcSolution fg_cpc(std::span<const PsdMatrix> sample, const FgOptions& options,
                   const std::optional<OrthonormalFrame>& init) {
  check_sample(sample);
  const int p = sample.front().dim();
  OrthonormalFrame start = init ? *init : fast_cpc(sample).frame;
  check_frame(sample, start);

  Matrix frame = start.matrix();
  std::vector<Matrix> t = rotated_sample(sample, start);

  CpcSolution out;
  out.objective_trace.push_back(objective_of(t));
  double stat = stationarity_of(t);
  int sweep = 0;
  while (stat >= options.tol && sweep < options.max_sweeps) {
    ++sweep;
    for (Eigen::Index l = 0; l < p; ++l) {
      for (Eigen::Index m = l + 1; m < p; ++m) {
        // After rotating by theta the (l, m) entry of each member becomes
        // c_i cos(2 theta) - d_i sin(2 theta); minimize the sum of squares
        // over the unit vector (cos 2theta, sin 2theta).
        double cc = 0.0, cd = 0.0, dd = 0.0;
        for (const auto& ti : t) {
          const double c = ti(l, m);
          const double d = 0.5 * (ti(l, l) - ti(m, m));
          cc += c * c;
          cd += c * d;
          dd += d * d;
        }
        const double scale = cc + dd;
        if (scale <= 0.0) continue;
        // q(phi) = (cc+dd)/2 + (cc-dd)/2 cos(2phi) - cd sin(2phi), phi = 2 theta
        const double a = 0.5 * (cc - dd);
        const double b = -cd;
        const double amp = std::hypot(a, b);
        if (amp <= 1e-300 || amp <= 1e-15 * scale) continue;
        const double phi = 0.5 * std::atan2(-b, -a);  // minimizer, in (-pi/2, pi/2]
        const double gain = a * (1.0 - std::cos(2.0 * phi)) - b * std::sin(2.0 * phi);
        if (!(gain > 0.0)) continue;
        const double theta = 0.5 * phi;
        apply_rotation(frame, t, l, m, std::cos(theta), std::sin(theta));
      }
    }
    for (auto& ti : t) ti = 0.5 * (ti + ti.transpose()).eval();
    out.objective_trace.push_back(objective_of(t));
    stat = stationarity_of(t);
  }

  // Re-orthonormalize accumulated rotations before validating the frame.
  Eigen::HouseholderQR<Matrix> qr(frame);
  Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  const OrthonormalFrame raw = OrthonormalFrame::make(q);
  out.frame = raw.canonical(mean_diagonal(rotated_sample(sample, raw)));
  const auto final_t = rotated_sample(sample, out.frame);
  out.objective = objective_of(final_t);
  out.stationarity_residual = stationarity_of(final_t);
  out.iterations = sweep;
  out.converged = out.stationarity_residual < options.tol;
  return out;
}

double flury_criterion(std::span<const PsdMatrix> sample, const OrthonormalFrame& b) {
  check_frame(sample, b);
  double total = 0.0;
  for (const auto& m : sample) {
    const Matrix t = rotate_into(m, b);
    Eigen::LLT<Matrix> llt(t);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kSingularMatrix, "flury criterion needs positive definite matrices");
    }
    const Vector l = llt.matrixL().toDenseMatrix().diagonal();
    double logdet = 0.0;
    double logdiag = 0.0;
    for (Eigen::Index j = 0; j < l.size(); ++j) {
      if (!(l(j) > 0.0) || !(t(j, j) > 0.0)) {
        throw Error(ErrorCode::kSingularMatrix, "flury criterion needs positive definite matrices");
      }
      logdet += 2.0 * std::log(l(j));
      logdiag += std::log(t(j, j));
    }
    total += logdiag - logdet;
  }
  return total;
}

double frame_angle(const OrthonormalFrame& a, const OrthonormalFrame& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimMismatch, "frames differ in dimension");
  const int p = a.dim();
  const Matrix dots = (a.matrix().transpose() * b.matrix()).cwiseAbs();
  std::vector<bool> used_a(p, false), used_b(p, false);
  double worst = 0.0;
  for (int step = 0; step < p; ++step) {
    int bi = -1, bj = -1;
    double best = -1.0;
    for (int i = 0; i < p; ++i) {
      if (used_a[i]) continue;
      for (int j = 0; j < p; ++j) {
        if (!used_b[j] && dots(i, j) > best) {
          best = dots(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    used_a[bi] = used_b[bj] = true;
    // Chord length keeps precision for nearly parallel columns, unlike acos.
    const double sign = a.matrix().col(bi).dot(b.matrix().col(bj)) < 0.0 ? -1.0 : 1.0;
    const double chord = (a.matrix().col(bi) - sign * b.matrix().col(bj)).norm();
    worst = std::max(worst, 2.0 * std::asin(std::min(1.0, 0.5 * chord)));
  }
  return worst;
}

}  // namespace kt
