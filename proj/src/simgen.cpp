#include "ktensors/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdio>

#include <unsupported/Eigen/MatrixFunctions>

namespace kt {

const char* to_string(Generator g) { return g == Generator::kCook ? "cook" : "wishart"; }

Generator parse_generator(const std::string& name) {
  if (name == "cook") return Generator::kCook;
  if (name == "wishart") return Generator::kWishart;
  throw Error(ErrorCode::kInvalidConfig, "unknown generator '" + name + "'");
}

const char* to_string(Grid g) { return g == Grid::kTable1 ? "table1" : "table2"; }

Grid parse_grid(const std::string& name) {
  if (name == "table1") return Grid::kTable1;
  if (name == "table2") return Grid::kTable2;
  throw Error(ErrorCode::kInvalidConfig, "unknown grid '" + name + "'");
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (p < 1) fail("p must be >= 1");
  if (k < 1) fail("k must be >= 1");
  if (n_per_cluster < 1) fail("n_per_cluster must be >= 1");
  if (!(noise_level >= 0.0)) fail("noise_level must be >= 0");
  if (!(separation >= 0.0 && separation <= 1.0)) fail("separation must lie in [0, 1]");
  if (!(eig_lo >= 0.0 && eig_hi >= eig_lo)) fail("eigenvalue law must satisfy 0 <= lo <= hi");
  if (generator == Generator::kWishart && df < p) fail("wishart df must be >= p");
}

PsdMatrix sample_wishart(const Matrix& scale, int df, Rng& rng) {
  const auto p = static_cast<int>(scale.rows());
  if (scale.cols() != p || p < 1) throw Error(ErrorCode::kNotSquare, "wishart scale must be square");
  if (df < p) throw Error(ErrorCode::kInvalidConfig, "wishart df must be >= p");
  // symmetric square root works for singular scales too
  const Matrix root = spectral_apply(0.5 * (scale + scale.transpose()),
                                     [](double v) { return std::sqrt(std::max(v, 0.0)); });
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    std::chi_squared_distribution<double> chi(static_cast<double>(df - j));
    a(j, j) = std::sqrt(chi(rng));
    for (int i = j + 1; i < p; ++i) a(i, j) = normal(rng);
  }
  const Matrix f = root * a;
  return PsdMatrix::make(f * f.transpose(), true);
}

std::vector<OrthonormalFrame> blended_frames(int p, int k, double separation, Rng& rng) {
  const Matrix base = random_orthonormal(p, rng).matrix();
  std::vector<OrthonormalFrame> frames;
  frames.reserve(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    Matrix target = random_orthonormal(p, rng).matrix();
    Matrix rel = base.transpose() * target;
    if (rel.determinant() < 0.0) {
      target.col(p - 1) = -target.col(p - 1);
      rel = base.transpose() * target;
    }
    Matrix u = base;
    if (separation >= 1.0) {
      u = target;
    } else if (separation > 0.0 && p > 1) {
      Matrix gen = rel.log();
      gen = 0.5 * (gen - gen.transpose());
      Matrix step = (separation * gen).exp();
      u = base * step;
    }
    // polish back onto the orthogonal group
    Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    frames.push_back(OrthonormalFrame::make(svd.matrixU() * svd.matrixV().transpose()));
  }
  return frames;
}

namespace {

Vector uniform_vector(int p, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector v(p);
  for (int j = 0; j < p; ++j) v(j) = lo == hi ? lo : unif(rng);
  return v;
}

}  // namespace

LabeledSample gen_cook(const ScenarioConfig& config) {
  config.validate();
  if (config.generator != Generator::kCook) {
    throw Error(ErrorCode::kInvalidConfig, "gen_cook needs generator = cook");
  }
  Rng rng(config.seed);
  LabeledSample out;
  out.config = config;
  out.frames = blended_frames(config.p, config.k, config.separation, rng);
  const Matrix identity = Matrix::Identity(config.p, config.p);
  for (int c = 0; c < config.k; ++c) {
    const Matrix& u = out.frames[static_cast<std::size_t>(c)].matrix();
    for (int i = 0; i < config.n_per_cluster; ++i) {
      Vector lambda = uniform_vector(config.p, config.eig_lo, config.eig_hi, rng);
      std::sort(lambda.data(), lambda.data() + lambda.size(), std::greater<>());
      Matrix psi = u * lambda.asDiagonal() * u.transpose();
      if (config.noise_level > 0.0) {
        const Matrix e = sample_wishart(identity, config.p, rng).matrix();
        psi += (config.noise_level / e.norm()) * e;
      }
      const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (psi + psi.transpose()), Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < 0.0) ++out.clamped;
      PsdMatrix kept = PsdMatrix::make(psi, true);
      out.noise_norms.push_back((kept.matrix() - u * lambda.asDiagonal() * u.transpose()).norm());
      out.matrices.push_back(std::move(kept));
      out.labels.push_back(c);
    }
  }
  return out;
}

LabeledSample gen_wishart(const ScenarioConfig& config) {
  config.validate();
  if (config.generator != Generator::kWishart) {
    throw Error(ErrorCode::kInvalidConfig, "gen_wishart needs generator = wishart");
  }
  Rng rng(config.seed);
  LabeledSample out;
  out.config = config;
  out.frames = blended_frames(config.p, config.k, config.separation, rng);
  // Expected scale per cluster: mean of sorted uniform draws on [lo, hi].
  Vector mean_d(config.p);
  for (int j = 0; j < config.p; ++j) {
    mean_d(j) = config.eig_hi - (config.eig_hi - config.eig_lo) * (j + 1) / (config.p + 1.0);
  }
  for (int c = 0; c < config.k; ++c) {
    const Matrix& u = out.frames[static_cast<std::size_t>(c)].matrix();
    Matrix scale = u * mean_d.asDiagonal() * u.transpose();
    out.scales.push_back(0.5 * (scale + scale.transpose()));
  }
  for (int c = 0; c < config.k; ++c) {
    const Matrix& u = out.frames[static_cast<std::size_t>(c)].matrix();
    for (int i = 0; i < config.n_per_cluster; ++i) {
      Vector d = uniform_vector(config.p, config.eig_lo, config.eig_hi, rng);
      std::sort(d.data(), d.data() + d.size(), std::greater<>());
      const Matrix scale = u * d.asDiagonal() * u.transpose();
      out.matrices.push_back(sample_wishart(0.5 * (scale + scale.transpose()), config.df, rng));
      out.labels.push_back(c);
    }
  }
  return out;
}

LabeledSample generate(const ScenarioConfig& config) {
  return config.generator == Generator::kCook ? gen_cook(config) : gen_wishart(config);
}

std::vector<ScenarioConfig> scenario_grid(Grid grid) {
  std::vector<ScenarioConfig> out;
  char buf[64];
  if (grid == Grid::kTable1) {
    for (int level = 1; level <= 6; ++level) {
      ScenarioConfig c;
      c.generator = Generator::kCook;
      c.noise_level = level / 10.0;
      std::snprintf(buf, sizeof buf, "table1_noise_%.1f", c.noise_level);
      c.id = buf;
      out.push_back(c);
    }
  } else {
    for (int df = 10; df <= 45; df += 5) {
      ScenarioConfig c;
      c.generator = Generator::kWishart;
      c.df = df;
      std::snprintf(buf, sizeof buf, "table2_df_%d", df);
      c.id = buf;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace kt
