#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ktensors/psd.hpp"

namespace kt {

enum class Generator { kCook, kWishart };

const char* to_string(Generator g);
Generator parse_generator(const std::string& name);

struct ScenarioConfig {
  std::string id;
  Generator generator = Generator::kCook;
  int p = 5;
  int n_per_cluster = 40;
  int k = 2;
  double noise_level = 0.0;  // cook: ||E_i||_F
  int df = 20;               // wishart degrees of freedom
  double separation = 0.3;   // 0: all clusters share one frame, 1: independent frames
  double eig_lo = 1.0;
  double eig_hi = 10.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws kInvalidConfig
};

struct LabeledSample {
  ScenarioConfig config;
  std::vector<PsdMatrix> matrices;
  std::vector<int> labels;
  std::vector<OrthonormalFrame> frames;  // generating frame per cluster
  std::vector<Matrix> scales;            // wishart expected scale per cluster (empty for cook)
  std::vector<double> noise_norms;       // cook: ||psi_i - U_k Lambda_i U_k^T||_F after clamping
  int clamped = 0;                       // outputs that needed PSD clamping
};

/// W_p(df, scale) by the Bartlett decomposition: S A A^T S^T with
/// S S^T = scale, A lower triangular, A_jj = sqrt(chi^2_{df-j}), A_ij ~ N(0,1).
PsdMatrix sample_wishart(const Matrix& scale, int df, Rng& rng);

/// Cluster frames blended between a shared base frame and independent Haar
/// frames along the rotation geodesic: U_k = U_0 expm(s logm(U_0^T R_k)).
std::vector<OrthonormalFrame> blended_frames(int p, int k, double separation, Rng& rng);

/// psi_i = U_k Lambda_i U_k^T + E_i, Lambda_i iid U[eig_lo, eig_hi] draws sorted descending,
/// E_i a W_p(p, I) draw rescaled to ||E_i||_F = noise_level.
LabeledSample gen_cook(const ScenarioConfig& config);

/// psi_i ~ W_p(df, U_k D_i U_k^T), D_i drawn per observation like Lambda_i above.
/// scales holds U_k E[D_i] U_k^T.
LabeledSample gen_wishart(const ScenarioConfig& config);

LabeledSample generate(const ScenarioConfig& config);

enum class Grid { kTable1, kTable2 };
Grid parse_grid(const std::string& name);
const char* to_string(Grid g);

/// table1: cook, noise 0.1..0.6; table2: wishart, df 10..45 step 5.
std::vector<ScenarioConfig> scenario_grid(Grid grid);

}  // namespace kt
