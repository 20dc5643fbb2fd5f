#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ktensors/simgen.hpp"

namespace kt {

/// Best agreement over relabelings of `pred`: exhaustive for k <= 8,
/// Hungarian assignment on the confusion matrix above that.
/// Throws kLengthMismatch, or kInvalidConfig for labels outside [0, k).
double accuracy(std::span<const int> pred, std::span<const int> truth, int k);

/// Adjusted Rand index from the pair-counting contingency table. Returns 1
/// when both partitions are trivial in the same way (the index is 0/0).
double adjusted_rand(std::span<const int> pred, std::span<const int> truth);

/// Maximum-weight perfect matching on a square matrix; result[row] = col.
std::vector<int> hungarian_max(const std::vector<std::vector<double>>& weight);

enum class Method { kKtLloyd, kKtFast, kKtHartigan, kEuclidean, kAffineInvariant, kLogDet };

inline constexpr Method kAllMethods[] = {Method::kKtLloyd,   Method::kKtFast,
                                         Method::kKtHartigan, Method::kEuclidean,
                                         Method::kAffineInvariant, Method::kLogDet};

const char* to_string(Method m);
Method parse_method(const std::string& name);
/// "all" or a comma-separated list; duplicates removed, canonical order kept.
std::vector<Method> parse_methods(const std::string& list);
bool is_ktensors(Method m);

struct BenchmarkRecord {
  std::string scenario_id;
  Generator generator = Generator::kCook;
  double noise_or_df = 0.0;
  Method method = Method::kKtFast;
  int replication = 0;
  std::uint64_t seed = 0;  // sample seed shared by all methods in the cell
  double accuracy = 0.0;
  double ari = 0.0;
  double loss = 0.0;
  int iterations = 0;
  double runtime_ms = 0.0;
  std::string error;  // empty on success
};

struct BenchOptions {
  int restarts = 10;
  int max_iter = 100;
  int threads = 1;
};

/// One generated sample per (scenario, replication), every method fitted to
/// it. Records come back sorted by (scenario, method, replication), so the
/// output does not depend on thread count or method order.
std::vector<BenchmarkRecord> run_benchmark(std::span<const ScenarioConfig> grid,
                                           std::span<const Method> methods, int replications,
                                           std::uint64_t seed, const BenchOptions& options = {});

struct SummaryRow {
  std::string scenario_id;
  double noise_or_df = 0.0;
  Method method = Method::kKtFast;
  double mean_accuracy = 0.0;
  double stderr_accuracy = 0.0;
  int n_reps = 0;
};

/// Mean accuracy per (scenario, method) over successful records, in first
/// appearance order of scenarios and canonical method order.
/// Throws kEmptyRecords.
std::vector<SummaryRow> summarize(std::span<const BenchmarkRecord> records);

void write_results_csv(std::ostream& out, std::span<const BenchmarkRecord> records);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
/// One row per noise/df level, one mean-accuracy column per method.
void write_plot_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace kt
