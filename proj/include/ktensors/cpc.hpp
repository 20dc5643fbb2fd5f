#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ktensors/psd.hpp"

namespace kt {

struct CpcSolution {
  OrthonormalFrame frame;
  double objective = 0.0;              // mean squared residual under `frame`
  double stationarity_residual = 0.0;
  int iterations = 0;                  // sweeps (fast_cpc: 1)
  bool converged = false;
  std::vector<double> objective_trace; // objective before sweep 1, then after each sweep
};

struct FgOptions {
  int max_sweeps = 200;
  double tol = 1e-8;
};

/// (1/n) sum_i ||psi_i - P_B(psi_i)||_F^2.
double cpc_objective(std::span<const PsdMatrix> sample, const OrthonormalFrame& b);

/// sqrt(sum_{l<m} g_lm^2) / n where
/// g_lm = b_l^T (sum_i (b_l^T psi_i b_l - b_m^T psi_i b_m) psi_i) b_m.
/// Zero exactly at the stationary frames of cpc_objective.
double stationarity_residual(std::span<const PsdMatrix> sample, const OrthonormalFrame& b);

/// Least-squares common principal components by cyclic pairwise (Jacobi)
/// rotations. Each rotation minimizes the sample objective exactly over the
/// angle in its column plane, so the objective never increases. Starts from
/// fast_cpc unless `init` is given. Stops when the stationarity residual
/// falls below `tol`; otherwise returns the last iterate with converged=false.
CpcSolution fg_cpc(std::span<const PsdMatrix> sample, const FgOptions& options = {},
                   const std::optional<OrthonormalFrame>& init = std::nullopt);

/// Eigenvectors of sum_i psi_i.
CpcSolution fast_cpc(std::span<const PsdMatrix> sample);

/// sum_i [log det diag(B^T psi_i B) - log det(B^T psi_i B)]; >= 0 by
/// Hadamard's inequality. Throws kSingularMatrix unless every member is PD.
double flury_criterion(std::span<const PsdMatrix> sample, const OrthonormalFrame& b);

/// Largest principal angle between matched columns of two frames, after
/// greedy matching on |dot| (columns are identified only up to order/sign).
double frame_angle(const OrthonormalFrame& a, const OrthonormalFrame& b);

}  // namespace kt
