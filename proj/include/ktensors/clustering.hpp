#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ktensors/cpc.hpp"
#include "ktensors/psd.hpp"

namespace kt {

enum class Algorithm { kLloyd, kFast, kHartigan };
enum class CpcSolver { kFg, kFast };

const char* to_string(Algorithm a);
const char* to_string(CpcSolver s);
Algorithm parse_algorithm(const std::string& name);  // throws kInvalidConfig
CpcSolver parse_cpc_solver(const std::string& name);

struct FitConfig {
  int k = 2;
  Algorithm algorithm = Algorithm::kFast;
  CpcSolver cpc_solver = CpcSolver::kFg;  // used by kLloyd
  int restarts = 10;
  int max_iter = 100;
  double tol = 1e-10;                     // relative loss change
  std::uint64_t seed = 0;
  FgOptions fg;

  void validate() const;  // throws kInvalidConfig
};

struct ClusterModel {
  int k = 0;
  Algorithm algorithm = Algorithm::kFast;
  CpcSolver cpc_solver = CpcSolver::kFg;
  std::vector<OrthonormalFrame> frames;
  std::vector<int> assignments;
  double loss = 0.0;                // sum_i min_h ||psi_i - P_{B_h}(psi_i)||^2
  std::vector<double> loss_trace;   // per iteration; per accepted move for hartigan
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;           // seed of the restart that won
  int restart = 0;
  int empty_cluster_repairs = 0;
  int moves = 0;                    // hartigan only
};

struct Assignment {
  std::vector<int> labels;
  std::vector<double> distances_sq;
  double loss = 0.0;
};

/// Nearest frame for each observation and the summed squared distance.
Assignment assign_all(std::span<const PsdMatrix> sample, std::span<const OrthonormalFrame> frames);

double total_loss(std::span<const PsdMatrix> sample, std::span<const OrthonormalFrame> frames);

/// Uniformly random partition of n items into k nonempty groups.
std::vector<int> random_partition(std::size_t n, int k, Rng& rng);

/// One run from a given partition (no restarts). Labels must lie in [0, k).
ClusterModel fit_from_partition(std::span<const PsdMatrix> sample, std::span<const int> labels,
                                const FitConfig& config);

/// Best-of-restarts fits; restart r starts from random_partition seeded by
/// derive_seed(config.seed, r). Ties go to the earliest restart.
ClusterModel fit_lloyd(std::span<const PsdMatrix> sample, const FitConfig& config);
ClusterModel fit_fast(std::span<const PsdMatrix> sample, const FitConfig& config);
ClusterModel fit_hartigan(std::span<const PsdMatrix> sample, const FitConfig& config);

/// Dispatches on config.algorithm.
ClusterModel fit(std::span<const PsdMatrix> sample, const FitConfig& config);

/// Per-cluster stationarity residual of each frame on its assigned members
/// (0 for empty clusters).
std::vector<double> cluster_stationarity(std::span<const PsdMatrix> sample, const ClusterModel& model);

}  // namespace kt
