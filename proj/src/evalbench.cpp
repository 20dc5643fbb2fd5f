#include "ktensors/evalbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "ktensors/baselines.hpp"
#include "ktensors/clustering.hpp"

namespace kt {

namespace {

void check_labels(std::span<const int> labels, int k) {
  for (int l : labels) {
    if (l < 0 || l >= k) throw Error(ErrorCode::kInvalidConfig, "label outside [0, k)");
  }
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::vector<int> hungarian_max(const std::vector<std::vector<double>>& weight) {
  // Classic O(n^3) potentials formulation on costs = max - weight.
  const int n = static_cast<int>(weight.size());
  double top = 0.0;
  for (const auto& row : weight) {
    for (double w : row) top = std::max(top, w);
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cost = top - weight[i0 - 1][j - 1];
        const double cur = cost - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(n, 0);
  for (int j = 1; j <= n; ++j) {
    if (match[j] > 0) out[match[j] - 1] = j - 1;
  }
  return out;
}

double accuracy(std::span<const int> pred, std::span<const int> truth, int k) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, "prediction and truth lengths differ");
  }
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  check_labels(pred, k);
  check_labels(truth, k);
  if (pred.empty()) return 1.0;
  const auto ku = static_cast<std::size_t>(k);
  std::vector<std::vector<double>> confusion(ku, std::vector<double>(ku, 0.0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    confusion[static_cast<std::size_t>(pred[i])][static_cast<std::size_t>(truth[i])] += 1.0;
  }
  double best = 0.0;
  if (k <= 8) {
    std::vector<int> perm(ku);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double agree = 0.0;
      for (std::size_t c = 0; c < ku; ++c) agree += confusion[c][static_cast<std::size_t>(perm[c])];
      best = std::max(best, agree);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    const auto match = hungarian_max(confusion);
    for (std::size_t c = 0; c < ku; ++c) best += confusion[c][static_cast<std::size_t>(match[c])];
  }
  return best / static_cast<double>(pred.size());
}

double adjusted_rand(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, "prediction and truth lengths differ");
  }
  const auto n = static_cast<double>(pred.size());
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    cells[{pred[i], truth[i]}] += 1.0;
    rows[pred[i]] += 1.0;
    cols[truth[i]] += 1.0;
  }
  double index = 0.0, a = 0.0, b = 0.0;
  for (const auto& [key, c] : cells) index += choose2(c);
  for (const auto& [key, c] : rows) a += choose2(c);
  for (const auto& [key, c] : cols) b += choose2(c);
  const double total = choose2(n);
  if (total <= 0.0) return 1.0;
  const double expected = a * b / total;
  const double max_index = 0.5 * (a + b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

const char* to_string(Method m) {
  switch (m) {
    case Method::kKtLloyd: return "ktensors_lloyd";
    case Method::kKtFast: return "ktensors_fast";
    case Method::kKtHartigan: return "ktensors_hartigan";
    case Method::kEuclidean: return "euclidean";
    case Method::kAffineInvariant: return "affine_invariant";
    case Method::kLogDet: return "log_det";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : kAllMethods) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown method '" + name + "'");
}

std::vector<Method> parse_methods(const std::string& list) {
  if (list == "all") return {std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<bool> wanted(std::size(kAllMethods), false);
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    wanted[static_cast<std::size_t>(parse_method(item))] = true;
  }
  std::vector<Method> out;
  for (Method m : kAllMethods) {
    if (wanted[static_cast<std::size_t>(m)]) out.push_back(m);
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidConfig, "no methods selected");
  return out;
}

bool is_ktensors(Method m) {
  return m == Method::kKtLloyd || m == Method::kKtFast || m == Method::kKtHartigan;
}

namespace {

struct FitOutcome {
  std::vector<int> labels;
  double loss = 0.0;
  int iterations = 0;
};

FitOutcome run_method(Method method, const LabeledSample& s, std::uint64_t seed, const BenchOptions& opt) {
  const int k = s.config.k;
  if (is_ktensors(method)) {
    FitConfig cfg;
    cfg.k = k;
    cfg.restarts = opt.restarts;
    cfg.max_iter = opt.max_iter;
    cfg.seed = seed;
    cfg.algorithm = method == Method::kKtLloyd  ? Algorithm::kLloyd
                    : method == Method::kKtFast ? Algorithm::kFast
                                                : Algorithm::kHartigan;
    const ClusterModel m = fit(s.matrices, cfg);
    return {m.assignments, m.loss, m.iterations};
  }
  BaselineConfig cfg;
  cfg.restarts = opt.restarts;
  cfg.max_iter = opt.max_iter;
  cfg.seed = seed;
  const MetricKind metric = method == Method::kEuclidean         ? MetricKind::kEuclidean
                            : method == Method::kAffineInvariant ? MetricKind::kAffineInvariant
                                                                 : MetricKind::kLogDet;
  const BaselineModel m = kmeans_metric(s.matrices, k, metric, cfg);
  return {m.assignments, m.loss, m.iterations};
}

double level_of(const ScenarioConfig& c) {
  return c.generator == Generator::kCook ? c.noise_level : static_cast<double>(c.df);
}

}  // namespace

std::vector<BenchmarkRecord> run_benchmark(std::span<const ScenarioConfig> grid,
                                           std::span<const Method> methods, int replications,
                                           std::uint64_t seed, const BenchOptions& options) {
  if (grid.empty() || methods.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "benchmark needs a nonempty grid and method list");
  }
  if (replications < 1) throw Error(ErrorCode::kInvalidConfig, "replications must be >= 1");
  const std::size_t cells = grid.size() * static_cast<std::size_t>(replications);
  std::vector<std::vector<BenchmarkRecord>> per_cell(cells);

  auto run_cell = [&](std::size_t cell) {
    const std::size_t s_idx = cell / static_cast<std::size_t>(replications);
    const int rep = static_cast<int>(cell % static_cast<std::size_t>(replications));
    ScenarioConfig cfg = grid[s_idx];
    cfg.seed = derive_seed(derive_seed(seed, s_idx), static_cast<std::uint64_t>(rep));
    auto& out = per_cell[cell];
    std::optional<LabeledSample> sample;
    std::string gen_error;
    try {
      sample = generate(cfg);
    } catch (const std::exception& e) {
      gen_error = e.what();
    }
    for (Method m : methods) {
      BenchmarkRecord r;
      r.scenario_id = cfg.id;
      r.generator = cfg.generator;
      r.noise_or_df = level_of(cfg);
      r.method = m;
      r.replication = rep;
      r.seed = cfg.seed;
      if (!sample) {
        r.error = gen_error;
        out.push_back(r);
        continue;
      }
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const FitOutcome f =
            run_method(m, *sample, derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(m)), options);
        r.accuracy = accuracy(f.labels, sample->labels, cfg.k);
        r.ari = adjusted_rand(f.labels, sample->labels);
        r.loss = f.loss;
        r.iterations = f.iterations;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      const auto t1 = std::chrono::steady_clock::now();
      r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      out.push_back(r);
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<BenchmarkRecord> records;
  records.reserve(cells * methods.size());
  for (std::size_t s_idx = 0; s_idx < grid.size(); ++s_idx) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      for (int rep = 0; rep < replications; ++rep) {
        records.push_back(per_cell[s_idx * static_cast<std::size_t>(replications) +
                                   static_cast<std::size_t>(rep)][mi]);
      }
    }
  }
  return records;
}

std::vector<SummaryRow> summarize(std::span<const BenchmarkRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyRecords, "no records to summarize");
  std::vector<std::string> scenarios;
  std::map<std::string, double> levels;
  std::map<std::pair<std::string, Method>, std::vector<double>> acc;
  std::map<std::pair<std::string, Method>, bool> seen;
  for (const auto& r : records) {
    if (!levels.count(r.scenario_id)) {
      scenarios.push_back(r.scenario_id);
      levels[r.scenario_id] = r.noise_or_df;
    }
    seen[{r.scenario_id, r.method}] = true;
    if (r.error.empty()) acc[{r.scenario_id, r.method}].push_back(r.accuracy);
  }
  std::vector<SummaryRow> out;
  for (const auto& id : scenarios) {
    for (Method m : kAllMethods) {
      if (!seen.count({id, m})) continue;
      SummaryRow row;
      row.scenario_id = id;
      row.noise_or_df = levels[id];
      row.method = m;
      const auto& v = acc[{id, m}];
      row.n_reps = static_cast<int>(v.size());
      if (!v.empty()) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        row.mean_accuracy = mean;
        row.stderr_accuracy =
            v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()))
                         : 0.0;
      } else {
        row.mean_accuracy = std::nan("");
      }
      out.push_back(row);
    }
  }
  return out;
}

void write_results_csv(std::ostream& out, std::span<const BenchmarkRecord> records) {
  out << "scenario_id,generator,noise_or_df,method,replication,seed,accuracy,ari,loss,iterations,"
         "runtime_ms,error\n";
  for (const auto& r : records) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.scenario_id << ',' << to_string(r.generator) << ',' << fmt("%g", r.noise_or_df) << ','
        << to_string(r.method) << ',' << r.replication << ',' << r.seed << ','
        << fmt("%.6f", r.accuracy) << ',' << fmt("%.6f", r.ari) << ',' << fmt("%.10g", r.loss) << ','
        << r.iterations << ',' << fmt("%.3f", r.runtime_ms) << ',' << err << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "scenario_id,noise_or_df,method,mean_accuracy,stderr,n_reps\n";
  for (const auto& r : rows) {
    out << r.scenario_id << ',' << fmt("%g", r.noise_or_df) << ',' << to_string(r.method) << ','
        << fmt("%.6f", r.mean_accuracy) << ',' << fmt("%.6f", r.stderr_accuracy) << ',' << r.n_reps
        << '\n';
  }
}

void write_plot_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  std::vector<Method> methods;
  std::vector<double> levels;
  std::map<std::pair<double, Method>, double> value;
  for (const auto& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    if (std::find(levels.begin(), levels.end(), r.noise_or_df) == levels.end()) {
      levels.push_back(r.noise_or_df);
    }
    value[{r.noise_or_df, r.method}] = r.mean_accuracy;
  }
  std::sort(methods.begin(), methods.end());
  out << "noise_or_df";
  for (Method m : methods) out << ',' << to_string(m);
  out << '\n';
  for (double level : levels) {
    out << fmt("%g", level);
    for (Method m : methods) {
      auto it = value.find({level, m});
      out << ',' << (it == value.end() ? std::string() : fmt("%.6f", it->second));
    }
    out << '\n';
  }
}

}  // namespace kt
