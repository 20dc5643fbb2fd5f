#include "ktensors/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ktensors/clustering.hpp"

namespace kt {

const char* to_string(MetricKind m) {
  switch (m) {
    case MetricKind::kEuclidean: return "euclidean";
    case MetricKind::kAffineInvariant: return "affine_invariant";
    case MetricKind::kLogDet: return "log_det";
  }
  return "?";
}

MetricKind parse_metric(const std::string& name) {
  if (name == "euclidean") return MetricKind::kEuclidean;
  if (name == "affine_invariant") return MetricKind::kAffineInvariant;
  if (name == "log_det") return MetricKind::kLogDet;
  throw Error(ErrorCode::kInvalidConfig, "unknown metric '" + name + "'");
}

const char* centroid_rule(MetricKind m) {
  switch (m) {
    case MetricKind::kEuclidean: return "arithmetic_mean";
    case MetricKind::kAffineInvariant: return "karcher_mean";
    case MetricKind::kLogDet: return "arithmetic_mean";
  }
  return "?";
}

namespace {

void check_pair(const PsdMatrix& a, const PsdMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimMismatch, "matrices differ in dimension");
}

struct Spectrum {
  Vector values;
  Matrix vectors;
};

Spectrum spectrum(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kConvergenceFailure, "symmetric eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

// Shifts both matrices by ridge * rho * I when either is too close to
// singular, so the pair stays comparable.
std::pair<Matrix, Matrix> regularized(const PsdMatrix& a, const PsdMatrix& b, double ridge) {
  const Spectrum sa = spectrum(a.matrix());
  const Spectrum sb = spectrum(b.matrix());
  const double rho = std::max(sa.values.cwiseAbs().maxCoeff(), sb.values.cwiseAbs().maxCoeff());
  const double shift = ridge * rho;
  Matrix ra = a.matrix();
  Matrix rb = b.matrix();
  if (std::min(sa.values.minCoeff(), sb.values.minCoeff()) < shift) {
    ra += shift * Matrix::Identity(a.dim(), a.dim());
    rb += shift * Matrix::Identity(b.dim(), b.dim());
  }
  return {ra, rb};
}

Matrix inv_sqrt(const Matrix& m) {
  const Spectrum s = spectrum(m);
  if (!(s.values.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kSingularAfterRidge, "matrix is singular after regularization");
  }
  Vector d = s.values.cwiseSqrt().cwiseInverse();
  Matrix out = s.vectors * d.asDiagonal() * s.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

// Eigenvalues of m^{-1/2} x m^{-1/2}.
Vector relative_spectrum(const Matrix& m, const Matrix& x) {
  const Matrix w = inv_sqrt(m);
  Matrix r = w * x * w;
  r = 0.5 * (r + r.transpose());
  return spectrum(r).values;
}

}  // namespace

double dist_euclidean(const PsdMatrix& a, const PsdMatrix& b) {
  check_pair(a, b);
  return (a.matrix() - b.matrix()).norm();
}

double dist_affine_invariant(const PsdMatrix& a, const PsdMatrix& b, double ridge) {
  check_pair(a, b);
  auto [ra, rb] = regularized(a, b, ridge);
  const Vector mu = relative_spectrum(ra, rb);
  if (!(mu.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kSingularAfterRidge, "matrix is singular after regularization");
  }
  double s = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) s += std::log(mu(j)) * std::log(mu(j));
  return std::sqrt(s);
}

double dist_logdet(const PsdMatrix& a, const PsdMatrix& b, double ridge) {
  check_pair(a, b);
  auto [ra, rb] = regularized(a, b, ridge);
  // b^{-1} a is similar to b^{-1/2} a b^{-1/2}
  const Vector mu = relative_spectrum(rb, ra);
  if (!(mu.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kSingularAfterRidge, "matrix is singular after regularization");
  }
  double s = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) s += mu(j) - 1.0 - std::log(mu(j));
  return std::max(s, 0.0);
}

Matrix matrix_log(const PsdMatrix& m) {
  const Spectrum s = spectrum(m.matrix());
  if (!(s.values.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kSingularMatrix, "matrix logarithm needs a positive definite matrix");
  }
  Vector d = s.values.array().log().matrix();
  Matrix out = s.vectors * d.asDiagonal() * s.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix matrix_exp(const Matrix& symmetric) {
  return spectral_apply(symmetric, [](double x) { return std::exp(x); });
}

PsdMatrix karcher_mean(std::span<const PsdMatrix> sample, int max_iter, double tol, double ridge) {
  if (sample.empty()) throw Error(ErrorCode::kEmptySample, "karcher mean of an empty sample");
  const int p = sample.front().dim();
  std::vector<Matrix> pts;
  pts.reserve(sample.size());
  for (const auto& m : sample) {
    const Spectrum s = spectrum(m.matrix());
    const double shift = ridge * s.values.cwiseAbs().maxCoeff();
    Matrix x = m.matrix();
    if (s.values.minCoeff() < shift) x += shift * Matrix::Identity(p, p);
    if (!(spectrum(x).values.minCoeff() > 0.0)) {
      throw Error(ErrorCode::kSingularAfterRidge, "matrix is singular after regularization");
    }
    pts.push_back(std::move(x));
  }
  Matrix x = Matrix::Zero(p, p);
  for (const auto& m : pts) x += m;
  x /= static_cast<double>(pts.size());

  for (int it = 0; it < max_iter; ++it) {
    const Spectrum s = spectrum(x);
    const Vector root = s.values.cwiseSqrt();
    const Matrix half = s.vectors * root.asDiagonal() * s.vectors.transpose();
    const Matrix inv_half = s.vectors * root.cwiseInverse().asDiagonal() * s.vectors.transpose();
    Matrix tangent = Matrix::Zero(p, p);
    for (const auto& m : pts) {
      Matrix r = inv_half * m * inv_half;
      tangent += spectral_apply(0.5 * (r + r.transpose()), [](double v) { return std::log(v); });
    }
    tangent /= static_cast<double>(pts.size());
    x = half * matrix_exp(tangent) * half;
    x = 0.5 * (x + x.transpose());
    if (tangent.norm() < tol) break;
  }
  return PsdMatrix::make(x, true);
}

void BaselineConfig::validate() const {
  if (restarts < 1 || max_iter < 1 || !(tol >= 0.0) || !(ridge >= 0.0) || karcher_max_iter < 1) {
    throw Error(ErrorCode::kInvalidConfig, "invalid baseline configuration");
  }
}

double metric_cost(MetricKind metric, const PsdMatrix& psi, const PsdMatrix& c, double ridge) {
  switch (metric) {
    case MetricKind::kEuclidean: {
      const double d = dist_euclidean(psi, c);
      return d * d;
    }
    case MetricKind::kAffineInvariant: {
      const double d = dist_affine_invariant(psi, c, ridge);
      return d * d;
    }
    case MetricKind::kLogDet: return dist_logdet(psi, c, ridge);
  }
  return 0.0;
}

PsdMatrix metric_centroid(MetricKind metric, std::span<const PsdMatrix> members,
                          const BaselineConfig& config) {
  if (members.empty()) throw Error(ErrorCode::kEmptySample, "centroid of an empty cluster");
  if (metric == MetricKind::kAffineInvariant) {
    return karcher_mean(members, config.karcher_max_iter, config.karcher_tol, config.ridge);
  }
  // The arithmetic mean is the exact minimizer for the Frobenius objective
  // and for the divergence with the centroid in the second argument.
  Matrix sum = Matrix::Zero(members.front().dim(), members.front().dim());
  for (const auto& m : members) sum += m.matrix();
  return PsdMatrix::make(sum / static_cast<double>(members.size()), true);
}

namespace {

BaselineModel run_kmeans(std::span<const PsdMatrix> sample, std::vector<int> labels, int k,
                         MetricKind metric, const BaselineConfig& cfg) {
  const std::size_t n = sample.size();
  const auto ku = static_cast<std::size_t>(k);
  BaselineModel model;
  model.k = k;
  model.metric = metric;
  std::vector<PsdMatrix> centroids(ku, PsdMatrix::identity(sample.front().dim()));
  double prev_loss = 0.0;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    for (int c = 0; c < k; ++c) {
      std::vector<PsdMatrix> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == c) members.push_back(sample[i]);
      }
      if (!members.empty()) centroids[static_cast<std::size_t>(c)] = metric_centroid(metric, members, cfg);
    }
    std::vector<int> next(n, 0);
    std::vector<double> cost(n, 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = metric_cost(metric, sample[i], centroids[static_cast<std::size_t>(c)], cfg.ridge);
        if (d < best) {
          best = d;
          next[i] = c;
        }
      }
      cost[i] = best;
      loss += best;
    }
    model.loss_trace.push_back(loss);
    model.iterations = iter;
    model.assignments = next;
    model.loss = loss;

    // empty cluster repair, same rule as the K-Tensors fits
    std::vector<int> counts(ku, 0);
    for (int l : next) ++counts[static_cast<std::size_t>(l)];
    std::vector<bool> moved(n, false);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      std::optional<std::size_t> pick;
      for (std::size_t i = 0; i < n; ++i) {
        if (moved[i] || counts[static_cast<std::size_t>(next[i])] <= 1) continue;
        if (!pick || cost[i] > cost[*pick]) pick = i;
      }
      if (!pick) break;
      --counts[static_cast<std::size_t>(next[*pick])];
      next[*pick] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      moved[*pick] = true;
      ++model.empty_cluster_repairs;
    }
    const bool same = next == labels;
    labels = std::move(next);
    if (iter > 1 && (same || std::abs(prev_loss - loss) <= cfg.tol * std::max(1.0, loss))) {
      model.converged = true;
      break;
    }
    prev_loss = loss;
  }
  model.centroids = std::move(centroids);
  return model;
}

void check_sample(std::span<const PsdMatrix> sample, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  if (sample.empty()) throw Error(ErrorCode::kEmptySample, "sample is empty");
  for (const auto& m : sample) {
    if (m.dim() != sample.front().dim()) {
      throw Error(ErrorCode::kDimMismatch, "sample matrices differ in dimension");
    }
  }
  if (sample.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewObservations, "fewer observations than clusters");
  }
}

}  // namespace

BaselineModel kmeans_from_partition(std::span<const PsdMatrix> sample, std::span<const int> labels,
                                    int k, MetricKind metric, const BaselineConfig& config) {
  config.validate();
  check_sample(sample, k);
  if (labels.size() != sample.size()) {
    throw Error(ErrorCode::kLengthMismatch, "initial partition length differs from sample size");
  }
  BaselineModel m = run_kmeans(sample, std::vector<int>(labels.begin(), labels.end()), k, metric, config);
  m.seed = config.seed;
  return m;
}

BaselineModel kmeans_metric(std::span<const PsdMatrix> sample, int k, MetricKind metric,
                            const BaselineConfig& config) {
  config.validate();
  check_sample(sample, k);
  std::optional<BaselineModel> best;
  for (int r = 0; r < config.restarts; ++r) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    BaselineModel m = run_kmeans(sample, random_partition(sample.size(), k, rng), k, metric, config);
    m.seed = config.seed;
    m.restart = r;
    if (!best || m.loss < best->loss) best = std::move(m);
  }
  return std::move(*best);
}

}  // namespace kt
