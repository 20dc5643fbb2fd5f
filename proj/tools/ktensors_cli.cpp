// ktensors command-line front end. Links only the C API.
//
// Exit codes: 0 success, 2 flag errors, 3 fit stopped at max_iter,
// 4 runtime or data errors.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ktensors/ktensors_c.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFlags = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitRuntime = 4;

int report(kt_status status) {
  std::fprintf(stderr, "error: %s: %s\n", kt_status_name(status), kt_last_error());
  return kExitRuntime;
}

struct SimulateArgs {
  std::string generator, out;
  int p = 5, k = 2, n = 40, df = 20;
  double noise = 0.0, separation = 0.3, eig_lo = 1.0, eig_hi = 10.0;
  std::uint64_t seed = 0;
};

struct FitArgs {
  std::string input, out, algorithm = "fast", cpc = "fg", format = "csv";
  int k = 2, restarts = 10, max_iter = 100;
  double tol = 1e-10;
  std::uint64_t seed = 0;
};

struct EvalArgs {
  std::string model, sample, format = "csv";
};

struct BenchArgs {
  std::string grid, methods = "all", out_dir;
  int reps = 20, threads = 1, restarts = 10, max_iter = 100;
  std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& a) {
  kt_scenario sc;
  kt_scenario_default(&sc);
  sc.generator = a.generator.c_str();
  sc.p = a.p;
  sc.k = a.k;
  sc.n_per_cluster = a.n;
  sc.noise_level = a.noise;
  sc.df = a.df;
  sc.separation = a.separation;
  sc.eig_lo = a.eig_lo;
  sc.eig_hi = a.eig_hi;
  sc.seed = a.seed;
  kt_sample* sample = nullptr;
  if (kt_status s = kt_sample_simulate(&sc, &sample); s != KT_OK) {
    return s == KT_ERR_INVALID_CONFIG ? (report(s), kExitFlags) : report(s);
  }
  const kt_status s = kt_sample_save(sample, a.out.c_str());
  if (s == KT_OK) std::printf("%s\n", kt_sample_config_json(sample));
  kt_sample_destroy(sample);
  return s == KT_OK ? kExitOk : report(s);
}

int run_fit(const FitArgs& a) {
  kt_sample* sample = nullptr;
  if (kt_status s = kt_sample_load(a.input.c_str(), &sample); s != KT_OK) return report(s);
  kt_fit_options opt;
  kt_fit_options_default(&opt);
  opt.k = a.k;
  opt.algorithm = a.algorithm.c_str();
  opt.cpc_solver = a.cpc.c_str();
  opt.restarts = a.restarts;
  opt.max_iter = a.max_iter;
  opt.tol = a.tol;
  opt.seed = a.seed;
  kt_model* model = nullptr;
  kt_status s = kt_fit(sample, &opt, &model);
  kt_sample_destroy(sample);
  if (s != KT_OK) return report(s);
  s = kt_model_save(model, a.out.c_str());
  if (s != KT_OK) {
    kt_model_destroy(model);
    return report(s);
  }
  const double loss = kt_model_loss(model);
  const int iters = kt_model_iterations(model);
  const bool converged = kt_model_converged(model) != 0;
  if (a.format == "json") {
    std::printf("{\"method\":\"%s\",\"loss\":%.17g,\"iterations\":%d,\"converged\":%s}\n",
                kt_model_method(model), loss, iters, converged ? "true" : "false");
  } else {
    std::printf("method,loss,iterations,converged\n%s,%.17g,%d,%d\n", kt_model_method(model), loss,
                iters, converged ? 1 : 0);
  }
  kt_model_destroy(model);
  return converged ? kExitOk : kExitNotConverged;
}

int run_eval(const EvalArgs& a) {
  kt_model* model = nullptr;
  kt_sample* sample = nullptr;
  if (kt_status s = kt_model_load(a.model.c_str(), &model); s != KT_OK) return report(s);
  if (kt_status s = kt_sample_load(a.sample.c_str(), &sample); s != KT_OK) {
    kt_model_destroy(model);
    return report(s);
  }
  int code = kExitOk;
  const size_t n = kt_model_size(model);
  const size_t truth_n = kt_sample_has_labels(sample) ? kt_sample_size(sample) : 0;
  if (n != truth_n) {
    std::fprintf(stderr, "error: LengthMismatch: model has %zu assignments, sample has %zu labels\n", n,
                 truth_n);
    code = kExitRuntime;
  } else {
    std::vector<int> pred(n), truth(n);
    kt_model_assignments(model, pred.data(), n);
    kt_sample_labels(sample, truth.data(), n);
    int k = kt_model_k(model);
    for (int t : truth) k = std::max(k, t + 1);
    double acc = 0.0, ari = 0.0;
    if (kt_status s = kt_evaluate(pred.data(), truth.data(), n, k, &acc, &ari); s != KT_OK) {
      code = report(s);
    } else if (a.format == "json") {
      std::printf("{\"accuracy\":%.6f,\"ari\":%.6f}\n", acc, ari);
    } else {
      std::printf("%.6f,%.6f\n", acc, ari);
    }
  }
  kt_sample_destroy(sample);
  kt_model_destroy(model);
  return code;
}

int run_bench(const BenchArgs& a) {
  kt_bench_options opt;
  kt_bench_options_default(&opt);
  opt.grid = a.grid.c_str();
  opt.methods = a.methods.c_str();
  opt.replications = a.reps;
  opt.seed = a.seed;
  opt.threads = a.threads;
  opt.restarts = a.restarts;
  opt.max_iter = a.max_iter;
  opt.out_dir = a.out_dir.c_str();
  size_t written = 0;
  if (kt_status s = kt_bench_run(&opt, &written); s != KT_OK) {
    return s == KT_ERR_INVALID_CONFIG ? (report(s), kExitFlags) : report(s);
  }
  std::printf("records,%zu\n", written);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ktensors: clustering positive semi-definite matrices by eigenstructure"};
  app.set_version_flag("--version", std::string(kt_version()));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a labeled sample");
  simulate->add_option("--generator", sim.generator, "cook or wishart")
      ->required()
      ->check(CLI::IsMember({"cook", "wishart"}));
  simulate->add_option("--p", sim.p, "Matrix dimension")->check(CLI::PositiveNumber);
  simulate->add_option("--k", sim.k, "Number of clusters")->check(CLI::PositiveNumber);
  simulate->add_option("--n", sim.n, "Observations per cluster")->check(CLI::PositiveNumber);
  simulate->add_option("--noise", sim.noise, "Cook noise level ||E_i||_F")->check(CLI::NonNegativeNumber);
  simulate->add_option("--df", sim.df, "Wishart degrees of freedom")->check(CLI::PositiveNumber);
  simulate->add_option("--separation", sim.separation, "Frame separation in [0,1]")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--eig-lo", sim.eig_lo, "Lower end of the eigenvalue law")->check(CLI::NonNegativeNumber);
  simulate->add_option("--eig-hi", sim.eig_hi, "Upper end of the eigenvalue law")->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--out", sim.out, "Output sample JSON")->required();

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Cluster a sample");
  fit->add_option("--input", fa.input, "Sample JSON")->required();
  fit->add_option("--k", fa.k, "Number of clusters")->check(CLI::PositiveNumber);
  fit->add_option("--algorithm", fa.algorithm, "K-Tensors variant or baseline metric")
      ->check(CLI::IsMember({"lloyd", "fast", "hartigan", "euclidean", "affine_invariant", "log_det"}));
  fit->add_option("--cpc", fa.cpc, "CPC solver for lloyd")->check(CLI::IsMember({"fg", "fast"}));
  fit->add_option("--restarts", fa.restarts, "Random restarts")->check(CLI::PositiveNumber);
  fit->add_option("--max-iter", fa.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  fit->add_option("--tol", fa.tol, "Relative loss-change tolerance")->check(CLI::NonNegativeNumber);
  fit->add_option("--seed", fa.seed, "RNG seed");
  fit->add_option("--out", fa.out, "Output model JSON")->required();
  fit->add_option("--format", fa.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score a model against sample labels");
  eval->add_option("--model", ea.model, "Model JSON")->required();
  eval->add_option("--sample", ea.sample, "Labeled sample JSON")->required();
  eval->add_option("--format", ea.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run a simulation benchmark grid");
  bench->add_option("--grid", ba.grid, "table1 or table2")
      ->required()
      ->check(CLI::IsMember({"table1", "table2"}));
  bench->add_option("--methods", ba.methods, "all or comma-separated method names");
  bench->add_option("--reps", ba.reps, "Replications per scenario")->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed, "Master seed");
  bench->add_option("--out-dir", ba.out_dir, "Output directory")->required();
  bench->add_option("--threads", ba.threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--restarts", ba.restarts, "Restarts per fit")->check(CLI::PositiveNumber);
  bench->add_option("--max-iter", ba.max_iter, "Iteration cap per fit")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    auto subs = app.get_subcommands();
    std::fprintf(stderr, "%s", (subs.empty() ? app.help() : subs.front()->help()).c_str());
    return kExitFlags;
  }

  if (*simulate) return run_simulate(sim);
  if (*fit) return run_fit(fa);
  if (*eval) return run_eval(ea);
  return run_bench(ba);
}
