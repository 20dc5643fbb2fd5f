#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ktensors/psd.hpp"

namespace kt {

enum class MetricKind { kEuclidean, kAffineInvariant, kLogDet };

const char* to_string(MetricKind m);
MetricKind parse_metric(const std::string& name);  // throws kInvalidConfig

/// Relative ridge: the absolute ridge is this times the larger spectral
/// radius of the two inputs.
inline constexpr double kDefaultRidge = 1e-8;

double dist_euclidean(const PsdMatrix& a, const PsdMatrix& b);

/// ||log(a^{-1/2} b a^{-1/2})||_F. If either input has an eigenvalue below
/// the absolute ridge, both are shifted by ridge * I. Throws
/// kSingularAfterRidge when that still leaves a singular matrix.
double dist_affine_invariant(const PsdMatrix& a, const PsdMatrix& b, double ridge = kDefaultRidge);

/// tr(b^{-1} a - I) - log det(b^{-1} a); asymmetric. Same ridge rule.
double dist_logdet(const PsdMatrix& a, const PsdMatrix& b, double ridge = kDefaultRidge);

/// U diag(log lambda) U^T. Throws kSingularMatrix unless all lambda > 0.
Matrix matrix_log(const PsdMatrix& m);
Matrix matrix_exp(const Matrix& symmetric);

/// Affine-invariant Karcher mean by the fixed-point iteration
/// X <- X^{1/2} exp(mean_i log(X^{-1/2} psi_i X^{-1/2})) X^{1/2},
/// started from the arithmetic mean.
PsdMatrix karcher_mean(std::span<const PsdMatrix> sample, int max_iter = 50, double tol = 1e-8,
                       double ridge = kDefaultRidge);

struct BaselineConfig {
  int restarts = 10;
  int max_iter = 100;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  double ridge = kDefaultRidge;
  int karcher_max_iter = 50;
  double karcher_tol = 1e-8;

  void validate() const;
};

struct BaselineModel {
  int k = 0;
  MetricKind metric = MetricKind::kEuclidean;
  std::vector<PsdMatrix> centroids;
  std::vector<int> assignments;
  double loss = 0.0;  // sum of d^2 (euclidean, affine) or of the divergence (log_det)
  std::vector<double> loss_trace;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  int restart = 0;
  int empty_cluster_repairs = 0;
};

/// Name of the centroid rule used for a metric, for result metadata.
const char* centroid_rule(MetricKind m);

/// Cost of putting `psi` in the cluster with centroid `c`.
double metric_cost(MetricKind metric, const PsdMatrix& psi, const PsdMatrix& c, double ridge);

PsdMatrix metric_centroid(MetricKind metric, std::span<const PsdMatrix> members,
                          const BaselineConfig& config);

/// Lloyd iterations under a metric with the restart/initialization scheme
/// shared with the K-Tensors fits.
BaselineModel kmeans_metric(std::span<const PsdMatrix> sample, int k, MetricKind metric,
                            const BaselineConfig& config);

BaselineModel kmeans_from_partition(std::span<const PsdMatrix> sample, std::span<const int> labels,
                                    int k, MetricKind metric, const BaselineConfig& config);

}  // namespace kt
