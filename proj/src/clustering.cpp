#include "ktensors/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "ktensors/projection.hpp"

namespace kt {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kLloyd: return "lloyd";
    case Algorithm::kFast: return "fast";
    case Algorithm::kHartigan: return "hartigan";
  }
  return "?";
}

const char* to_string(CpcSolver s) { return s == CpcSolver::kFg ? "fg" : "fast"; }

Algorithm parse_algorithm(const std::string& name) {
  if (name == "lloyd") return Algorithm::kLloyd;
  if (name == "fast") return Algorithm::kFast;
  if (name == "hartigan") return Algorithm::kHartigan;
  throw Error(ErrorCode::kInvalidConfig, "unknown algorithm '" + name + "'");
}

CpcSolver parse_cpc_solver(const std::string& name) {
  if (name == "fg") return CpcSolver::kFg;
  if (name == "fast") return CpcSolver::kFast;
  throw Error(ErrorCode::kInvalidConfig, "unknown cpc solver '" + name + "'");
}

void FitConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  if (restarts < 1) throw Error(ErrorCode::kInvalidConfig, "restarts must be >= 1");
  if (max_iter < 1) throw Error(ErrorCode::kInvalidConfig, "max_iter must be >= 1");
  if (!(tol >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "tol must be >= 0");
  if (fg.max_sweeps < 1 || !(fg.tol > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "fg options need max_sweeps >= 1 and tol > 0");
  }
}

namespace {

void check_sample(std::span<const PsdMatrix> sample, int k) {
  if (sample.empty()) throw Error(ErrorCode::kEmptySample, "sample is empty");
  const int p = sample.front().dim();
  for (const auto& m : sample) {
    if (m.dim() != p) throw Error(ErrorCode::kDimMismatch, "sample matrices differ in dimension");
  }
  if (sample.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewObservations,
                "need at least k=" + std::to_string(k) + " observations, got " +
                    std::to_string(sample.size()));
  }
}

std::vector<PsdMatrix> members_of(std::span<const PsdMatrix> sample, std::span<const int> labels,
                                  int cluster) {
  std::vector<PsdMatrix> out;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (labels[i] == cluster) out.push_back(sample[i]);
  }
  return out;
}

double sum_residual_sq(std::span<const PsdMatrix> members, const OrthonormalFrame& b) {
  double s = 0.0;
  for (const auto& m : members) s += residual_distance_sq(m, b);
  return s;
}

// Moves the farthest observation (from a cluster that can spare one) into
// each empty cluster. Returns the number of repairs.
int repair_empty(std::vector<int>& labels, const std::vector<double>& dist_sq, int k) {
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  std::vector<bool> moved(labels.size(), false);
  int repairs = 0;
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) continue;
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (moved[i] || counts[static_cast<std::size_t>(labels[i])] <= 1) continue;
      if (!pick || dist_sq[i] > dist_sq[*pick]) pick = i;
    }
    if (!pick) break;
    --counts[static_cast<std::size_t>(labels[*pick])];
    labels[*pick] = c;
    counts[static_cast<std::size_t>(c)] = 1;
    moved[*pick] = true;
    ++repairs;
  }
  return repairs;
}

OrthonormalFrame frame_of_sum(const Matrix& omega) { return sym_eigen(omega).vectors; }

// Alternating CPC / assignment (Lloyd-style; covers the fast variant).
ClusterModel run_batch(std::span<const PsdMatrix> sample, std::vector<int> labels,
                       const FitConfig& cfg) {
  const int k = cfg.k;
  const int p = sample.front().dim();
  const bool use_fg = cfg.algorithm == Algorithm::kLloyd && cfg.cpc_solver == CpcSolver::kFg;

  ClusterModel model;
  model.k = k;
  model.algorithm = cfg.algorithm;
  model.cpc_solver = cfg.cpc_solver;
  std::vector<OrthonormalFrame> frames(static_cast<std::size_t>(k), OrthonormalFrame::identity(p));
  bool have_prev = false;
  double prev_loss = 0.0;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    std::vector<OrthonormalFrame> next = frames;
    for (int c = 0; c < k; ++c) {
      const auto members = members_of(sample, labels, c);
      if (members.empty()) continue;
      const auto& prev = frames[static_cast<std::size_t>(c)];
      CpcSolution sol;
      if (use_fg) {
        sol = fg_cpc(members, cfg.fg);
        if (have_prev) {
          CpcSolution warm = fg_cpc(members, cfg.fg, prev);
          if (warm.objective < sol.objective) sol = std::move(warm);
        }
      } else {
        sol = fast_cpc(members);
      }
      // Keep the previous frame when the new estimate fits this cluster
      // worse; this is what makes the loss sequence monotone.
      if (have_prev && sum_residual_sq(members, prev) < sum_residual_sq(members, sol.frame)) {
        continue;
      }
      next[static_cast<std::size_t>(c)] = sol.frame;
    }
    frames = std::move(next);

    Assignment a = assign_all(sample, frames);
    model.loss_trace.push_back(a.loss);
    model.iterations = iter;
    model.assignments = a.labels;
    model.loss = a.loss;
    labels = a.labels;
    model.empty_cluster_repairs += repair_empty(labels, a.distances_sq, k);

    if (have_prev && std::abs(prev_loss - a.loss) <= cfg.tol * std::max(1.0, a.loss)) {
      model.converged = true;
      break;
    }
    prev_loss = a.loss;
    have_prev = true;
  }
  model.frames = std::move(frames);
  return model;
}

// Hartigan-style single-observation moves. Each psi_i is offered to the
// cluster whose eigen-of-sum frame, with psi_i counted in, fits it best; the
// move is kept only if the min-distance loss over all observations, with
// frames rebuilt from the new partition, strictly drops.
ClusterModel run_hartigan(std::span<const PsdMatrix> sample, std::vector<int> labels,
                          const FitConfig& cfg) {
  const int k = cfg.k;
  const int p = sample.front().dim();
  const std::size_t n = sample.size();
  const auto ku = static_cast<std::size_t>(k);

  std::vector<Matrix> sums(ku, Matrix::Zero(p, p));
  std::vector<int> sizes(ku, 0);
  for (std::size_t i = 0; i < n; ++i) {
    sums[static_cast<std::size_t>(labels[i])] += sample[i].matrix();
    ++sizes[static_cast<std::size_t>(labels[i])];
  }

  // Residuals of every observation under every frame; columns refresh on frame change.
  Matrix resid(static_cast<Eigen::Index>(n), k);
  auto refresh = [&](Matrix& r, int c, const OrthonormalFrame& b) {
    for (std::size_t j = 0; j < n; ++j) r(static_cast<Eigen::Index>(j), c) = residual_distance_sq(sample[j], b);
  };
  auto min_loss = [&](const Matrix& r) { return r.rowwise().minCoeff().sum(); };

  std::vector<OrthonormalFrame> frames(ku, OrthonormalFrame::identity(p));
  for (int c = 0; c < k; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    if (sizes[cu] > 0) frames[cu] = frame_of_sum(sums[cu]);
    refresh(resid, c, frames[cu]);
  }

  ClusterModel model;
  model.k = k;
  model.algorithm = Algorithm::kHartigan;
  model.cpc_solver = CpcSolver::kFast;
  double total = min_loss(resid);
  model.loss_trace.push_back(total);

  Matrix trial(resid.rows(), resid.cols());
  for (int sweep = 1; sweep <= cfg.max_iter; ++sweep) {
    model.iterations = sweep;
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = labels[i];
      const auto au = static_cast<std::size_t>(a);
      if (sizes[au] <= 1) continue;

      int best = a;
      double best_fit = resid(static_cast<Eigen::Index>(i), a);
      OrthonormalFrame best_frame;
      for (int b = 0; b < k; ++b) {
        if (b == a) continue;
        const OrthonormalFrame fb = frame_of_sum(sums[static_cast<std::size_t>(b)] + sample[i].matrix());
        const double fit = residual_distance_sq(sample[i], fb);
        if (fit < best_fit) {
          best_fit = fit;
          best = b;
          best_frame = fb;
        }
      }
      if (best == a) continue;

      const OrthonormalFrame frame_a = frame_of_sum(sums[au] - sample[i].matrix());
      trial = resid;
      refresh(trial, a, frame_a);
      refresh(trial, best, best_frame);
      const double candidate = min_loss(trial);
      if (!(candidate < total - 1e-12 * std::max(1.0, total))) continue;

      const auto bu = static_cast<std::size_t>(best);
      sums[au] -= sample[i].matrix();
      sums[bu] += sample[i].matrix();
      --sizes[au];
      ++sizes[bu];
      labels[i] = best;
      frames[au] = frame_a;
      frames[bu] = best_frame;
      resid.swap(trial);
      total = candidate;
      model.loss_trace.push_back(total);
      ++model.moves;
      moved = true;
    }
    if (!moved) {
      model.converged = true;
      break;
    }
  }

  // Rebuild frames from exact sums so the model does not carry drift.
  for (int c = 0; c < k; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    const auto members = members_of(sample, labels, c);
    if (!members.empty()) frames[cu] = fast_cpc(members).frame;
  }
  model.frames = std::move(frames);
  model.assignments = std::move(labels);
  model.loss = total_loss(sample, model.frames);
  return model;
}

template <class Run>
ClusterModel best_of_restarts(std::span<const PsdMatrix> sample, const FitConfig& cfg, Run run) {
  cfg.validate();
  check_sample(sample, cfg.k);
  std::optional<ClusterModel> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    ClusterModel m = run(sample, random_partition(sample.size(), cfg.k, rng), cfg);
    m.seed = cfg.seed;
    m.restart = r;
    if (!best || m.loss < best->loss) best = std::move(m);
  }
  return std::move(*best);
}

}  // namespace

Assignment assign_all(std::span<const PsdMatrix> sample, std::span<const OrthonormalFrame> frames) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyFrameSet, "no frames to assign to");
  Assignment out;
  out.labels.resize(sample.size());
  out.distances_sq.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t h = 0; h < frames.size(); ++h) {
      const double d = residual_distance_sq(sample[i], frames[h]);
      if (d < best) {
        best = d;
        arg = static_cast<int>(h);
      }
    }
    out.labels[i] = arg;
    out.distances_sq[i] = best;
    out.loss += best;
  }
  return out;
}

double total_loss(std::span<const PsdMatrix> sample, std::span<const OrthonormalFrame> frames) {
  return assign_all(sample, frames).loss;
}

std::vector<int> random_partition(std::size_t n, int k, Rng& rng) {
  if (k < 1 || n < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewObservations, "cannot split n items into k nonempty groups");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> labels(n, 0);
  std::uniform_int_distribution<int> pick(0, k - 1);
  for (std::size_t j = 0; j < n; ++j) {
    labels[order[j]] = j < static_cast<std::size_t>(k) ? static_cast<int>(j) : pick(rng);
  }
  return labels;
}

ClusterModel fit_from_partition(std::span<const PsdMatrix> sample, std::span<const int> labels,
                                const FitConfig& config) {
  config.validate();
  check_sample(sample, config.k);
  if (labels.size() != sample.size()) {
    throw Error(ErrorCode::kLengthMismatch, "initial partition length differs from sample size");
  }
  for (int l : labels) {
    if (l < 0 || l >= config.k) throw Error(ErrorCode::kInvalidConfig, "initial label out of range");
  }
  std::vector<int> init(labels.begin(), labels.end());
  ClusterModel m = config.algorithm == Algorithm::kHartigan ? run_hartigan(sample, init, config)
                                                            : run_batch(sample, init, config);
  m.seed = config.seed;
  return m;
}

ClusterModel fit_lloyd(std::span<const PsdMatrix> sample, const FitConfig& config) {
  FitConfig cfg = config;
  cfg.algorithm = Algorithm::kLloyd;
  return best_of_restarts(sample, cfg, run_batch);
}

ClusterModel fit_fast(std::span<const PsdMatrix> sample, const FitConfig& config) {
  FitConfig cfg = config;
  cfg.algorithm = Algorithm::kFast;
  return best_of_restarts(sample, cfg, run_batch);
}

ClusterModel fit_hartigan(std::span<const PsdMatrix> sample, const FitConfig& config) {
  FitConfig cfg = config;
  cfg.algorithm = Algorithm::kHartigan;
  return best_of_restarts(sample, cfg, run_hartigan);
}

ClusterModel fit(std::span<const PsdMatrix> sample, const FitConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kLloyd: return fit_lloyd(sample, config);
    case Algorithm::kFast: return fit_fast(sample, config);
    case Algorithm::kHartigan: return fit_hartigan(sample, config);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown algorithm");
}

std::vector<double> cluster_stationarity(std::span<const PsdMatrix> sample, const ClusterModel& model) {
  std::vector<double> out(static_cast<std::size_t>(model.k), 0.0);
  for (int c = 0; c < model.k; ++c) {
    const auto members = members_of(sample, model.assignments, c);
    if (!members.empty()) {
      out[static_cast<std::size_t>(c)] =
          stationarity_residual(members, model.frames[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

}  // namespace kt
