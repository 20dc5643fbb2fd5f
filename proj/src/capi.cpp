#include "ktensors/ktensors_c.h"

#include <cstring>
#include <algorithm>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "ktensors/baselines.hpp"
#include "ktensors/clustering.hpp"
#include "ktensors/evalbench.hpp"
#include "ktensors/io.hpp"
#include "ktensors/projection.hpp"
#include "ktensors/simgen.hpp"

struct kt_sample {
  kt::LabeledSample data;
  bool has_config = false;
  std::string config_json;
};

struct kt_model {
  std::variant<kt::ClusterModel, kt::BaselineModel> model;
  std::string method;
  std::vector<double> stationarity;
  kt::Json fit_config;
};

namespace {

thread_local std::string last_error;

kt_status fail(kt_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
kt_status guarded(F&& body) {
  try {
    body();
    return KT_OK;
  } catch (const kt::Error& e) {
    return fail(static_cast<kt_status>(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(KT_ERR_UNKNOWN, e.what());
  }
}

kt::Matrix read_matrix(const double* data, int p) {
  kt::Matrix m(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) m(i, j) = data[i * p + j];
  }
  return m;
}

const std::string kNull = "argument must not be NULL";

std::string methods_label(const std::vector<kt::Method>& methods) {
  std::string out;
  for (auto m : methods) {
    if (!out.empty()) out += ',';
    out += kt::to_string(m);
  }
  return out;
}

}  // namespace

extern "C" {

const char* kt_version(void) { return kt::kVersion; }
const char* kt_last_error(void) { return last_error.c_str(); }

const char* kt_status_name(kt_status status) {
  switch (status) {
    case KT_OK: return "Ok";
    case KT_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case KT_ERR_UNKNOWN: return "Unknown";
    default:
      if (status >= KT_ERR_NOT_SQUARE && status <= KT_ERR_PARSE) {
        return kt::error_code_name(static_cast<kt::ErrorCode>(status));
      }
      return "Unknown";
  }
}

void kt_scenario_default(kt_scenario* out) {
  if (!out) return;
  const kt::ScenarioConfig c;
  out->generator = "cook";
  out->p = c.p;
  out->n_per_cluster = c.n_per_cluster;
  out->k = c.k;
  out->noise_level = c.noise_level;
  out->df = c.df;
  out->separation = c.separation;
  out->eig_lo = c.eig_lo;
  out->eig_hi = c.eig_hi;
  out->seed = c.seed;
}

kt_status kt_sample_simulate(const kt_scenario* scenario, kt_sample** out) {
  if (!scenario || !out || !scenario->generator) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  *out = nullptr;
  return guarded([&] {
    kt::ScenarioConfig c;
    c.generator = kt::parse_generator(scenario->generator);
    c.p = scenario->p;
    c.n_per_cluster = scenario->n_per_cluster;
    c.k = scenario->k;
    c.noise_level = scenario->noise_level;
    c.df = scenario->df;
    c.separation = scenario->separation;
    c.eig_lo = scenario->eig_lo;
    c.eig_hi = scenario->eig_hi;
    c.seed = scenario->seed;
    auto s = std::make_unique<kt_sample>();
    s->data = kt::generate(c);
    s->has_config = true;
    s->config_json = kt::config_to_json(c).dump();
    *out = s.release();
  });
}

kt_status kt_sample_from_matrices(const double* data, size_t n, int p, kt_sample** out) {
  if (!data || !out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  if (p < 1) return fail(KT_ERR_INVALID_ARGUMENT, "p must be >= 1");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<kt_sample>();
    const auto stride = static_cast<std::size_t>(p) * static_cast<std::size_t>(p);
    for (std::size_t i = 0; i < n; ++i) {
      s->data.matrices.push_back(kt::make_psd(read_matrix(data + i * stride, p)));
    }
    *out = s.release();
  });
}

kt_status kt_sample_load(const char* path, kt_sample** out) {
  if (!path || !out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  *out = nullptr;
  return guarded([&] {
    const kt::Json j = kt::read_json_file(path);
    auto s = std::make_unique<kt_sample>();
    s->data = kt::sample_from_json(j);
    if (j.contains("config")) {
      s->has_config = true;
      s->config_json = kt::config_to_json(s->data.config).dump();
    }
    if (s->data.matrices.empty()) throw kt::Error(kt::ErrorCode::kEmptySample, "sample file has no matrices");
    *out = s.release();
  });
}

kt_status kt_sample_save(const kt_sample* sample, const char* path) {
  if (!sample || !path) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  return guarded([&] {
    kt::Json j = kt::sample_to_json(sample->data);
    if (!sample->has_config) j.erase("config");
    kt::write_json_file(path, j);
  });
}

void kt_sample_destroy(kt_sample* sample) { delete sample; }

size_t kt_sample_size(const kt_sample* sample) { return sample ? sample->data.matrices.size() : 0; }

int kt_sample_dim(const kt_sample* sample) {
  return sample && !sample->data.matrices.empty() ? sample->data.matrices.front().dim() : 0;
}

int kt_sample_has_labels(const kt_sample* sample) {
  return sample && !sample->data.labels.empty() ? 1 : 0;
}

kt_status kt_sample_labels(const kt_sample* sample, int* out, size_t len) {
  if (!sample || !out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  if (len != sample->data.labels.size()) {
    return fail(KT_ERR_LENGTH_MISMATCH, "label buffer length " + std::to_string(len) +
                                            " differs from " + std::to_string(sample->data.labels.size()));
  }
  std::copy(sample->data.labels.begin(), sample->data.labels.end(), out);
  return KT_OK;
}

kt_status kt_sample_matrix(const kt_sample* sample, size_t index, double* out) {
  if (!sample || !out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  if (index >= sample->data.matrices.size()) return fail(KT_ERR_INVALID_ARGUMENT, "index out of range");
  const auto& m = sample->data.matrices[index].matrix();
  const auto p = m.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) out[i * p + j] = m(i, j);
  }
  return KT_OK;
}

const char* kt_sample_config_json(const kt_sample* sample) {
  return sample && sample->has_config ? sample->config_json.c_str() : nullptr;
}

void kt_fit_options_default(kt_fit_options* out) {
  if (!out) return;
  const kt::FitConfig c;
  out->k = c.k;
  out->algorithm = "fast";
  out->cpc_solver = "fg";
  out->restarts = c.restarts;
  out->max_iter = c.max_iter;
  out->tol = c.tol;
  out->seed = c.seed;
}

kt_status kt_fit(const kt_sample* sample, const kt_fit_options* options, kt_model** out) {
  if (!sample || !options || !out || !options->algorithm) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  *out = nullptr;
  return guarded([&] {
    const std::string algo = options->algorithm;
    auto m = std::make_unique<kt_model>();
    const auto& matrices = sample->data.matrices;
    if (algo == "lloyd" || algo == "fast" || algo == "hartigan") {
      kt::FitConfig cfg;
      cfg.k = options->k;
      cfg.algorithm = kt::parse_algorithm(algo);
      cfg.cpc_solver = kt::parse_cpc_solver(options->cpc_solver ? options->cpc_solver : "fg");
      cfg.restarts = options->restarts;
      cfg.max_iter = options->max_iter;
      cfg.tol = options->tol;
      cfg.seed = options->seed;
      kt::ClusterModel cm = kt::fit(matrices, cfg);
      m->stationarity = kt::cluster_stationarity(matrices, cm);
      m->method = std::string("ktensors_") + algo;
      m->fit_config = kt::Json{{"k", cfg.k},
                               {"algorithm", algo},
                               {"cpc_solver", kt::to_string(cfg.cpc_solver)},
                               {"restarts", cfg.restarts},
                               {"max_iter", cfg.max_iter},
                               {"tol", cfg.tol},
                               {"seed", cfg.seed},
                               {"fg_tol", cfg.fg.tol},
                               {"fg_max_sweeps", cfg.fg.max_sweeps}};
      m->model = std::move(cm);
    } else {
      const kt::MetricKind metric = kt::parse_metric(algo);
      kt::BaselineConfig cfg;
      cfg.restarts = options->restarts;
      cfg.max_iter = options->max_iter;
      cfg.tol = options->tol;
      cfg.seed = options->seed;
      if (options->k < 1) throw kt::Error(kt::ErrorCode::kInvalidConfig, "k must be >= 1");
      m->model = kt::kmeans_metric(matrices, options->k, metric, cfg);
      m->method = algo;
      m->fit_config = kt::Json{{"k", options->k},
                               {"algorithm", algo},
                               {"centroid_rule", kt::centroid_rule(metric)},
                               {"restarts", cfg.restarts},
                               {"max_iter", cfg.max_iter},
                               {"tol", cfg.tol},
                               {"seed", cfg.seed},
                               {"ridge", cfg.ridge}};
    }
    *out = m.release();
  });
}

kt_status kt_model_save(const kt_model* model, const char* path) {
  if (!model || !path) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  return guarded([&] {
    kt::Json j = std::visit([](const auto& m) { return kt::model_to_json(m); }, model->model);
    j["config"] = model->fit_config;
    if (std::holds_alternative<kt::ClusterModel>(model->model)) {
      j["diagnostics"] = kt::Json{{"stationarity_residual", model->stationarity}};
    }
    kt::write_json_file(path, j);
  });
}

kt_status kt_model_load(const char* path, kt_model** out) {
  if (!path || !out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  *out = nullptr;
  return guarded([&] {
    const kt::Json j = kt::read_json_file(path);
    auto m = std::make_unique<kt_model>();
    if (j.is_object() && j.contains("frames")) {
      m->model = kt::cluster_model_from_json(j);
      if (j.contains("diagnostics") && j["diagnostics"].contains("stationarity_residual")) {
        m->stationarity = j["diagnostics"]["stationarity_residual"].get<std::vector<double>>();
      }
    } else if (j.is_object() && j.contains("centroids")) {
      m->model = kt::baseline_model_from_json(j);
    } else {
      throw kt::Error(kt::ErrorCode::kParse, "'" + std::string(path) + "' is not a model file");
    }
    m->method = j.value("method", std::string());
    m->fit_config = j.value("config", kt::Json::object());
    *out = m.release();
  });
}

void kt_model_destroy(kt_model* model) { delete model; }

const char* kt_model_method(const kt_model* model) { return model ? model->method.c_str() : ""; }

int kt_model_k(const kt_model* model) {
  return model ? std::visit([](const auto& m) { return m.k; }, model->model) : 0;
}

size_t kt_model_size(const kt_model* model) {
  return model ? std::visit([](const auto& m) { return m.assignments.size(); }, model->model) : 0;
}

double kt_model_loss(const kt_model* model) {
  return model ? std::visit([](const auto& m) { return m.loss; }, model->model) : 0.0;
}

int kt_model_iterations(const kt_model* model) {
  return model ? std::visit([](const auto& m) { return m.iterations; }, model->model) : 0;
}

int kt_model_converged(const kt_model* model) {
  return model && std::visit([](const auto& m) { return m.converged; }, model->model) ? 1 : 0;
}

kt_status kt_model_assignments(const kt_model* model, int* out, size_t len) {
  if (!model || !out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  const auto& a = std::visit([](const auto& m) -> const std::vector<int>& { return m.assignments; },
                             model->model);
  if (len != a.size()) return fail(KT_ERR_LENGTH_MISMATCH, "assignment buffer length differs from model size");
  std::copy(a.begin(), a.end(), out);
  return KT_OK;
}

kt_status kt_model_stationarity(const kt_model* model, double* out, size_t len) {
  if (!model || !out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  if (!std::holds_alternative<kt::ClusterModel>(model->model) || model->stationarity.empty()) {
    return fail(KT_ERR_INVALID_ARGUMENT, "model carries no stationarity diagnostics");
  }
  if (len != model->stationarity.size()) return fail(KT_ERR_LENGTH_MISMATCH, "buffer length differs from k");
  std::copy(model->stationarity.begin(), model->stationarity.end(), out);
  return KT_OK;
}

kt_status kt_evaluate(const int* pred, const int* truth, size_t n, int k, double* accuracy, double* ari) {
  if ((n > 0 && (!pred || !truth)) || !accuracy || !ari) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  return guarded([&] {
    std::span<const int> p(pred, n), t(truth, n);
    *accuracy = kt::accuracy(p, t, k);
    *ari = kt::adjusted_rand(p, t);
  });
}

void kt_bench_options_default(kt_bench_options* out) {
  if (!out) return;
  const kt::BenchOptions b;
  out->grid = "table1";
  out->methods = "all";
  out->replications = 20;
  out->seed = 0;
  out->threads = b.threads;
  out->restarts = b.restarts;
  out->max_iter = b.max_iter;
  out->out_dir = ".";
}

kt_status kt_bench_run(const kt_bench_options* options, size_t* records_written) {
  if (!options || !options->grid || !options->methods || !options->out_dir) {
    return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  }
  return guarded([&] {
    const kt::Grid grid = kt::parse_grid(options->grid);
    const auto methods = kt::parse_methods(options->methods);
    const auto scenarios = kt::scenario_grid(grid);
    kt::BenchOptions bo;
    bo.restarts = options->restarts;
    bo.max_iter = options->max_iter;
    bo.threads = options->threads;
    if (bo.restarts < 1 || bo.max_iter < 1) {
      throw kt::Error(kt::ErrorCode::kInvalidConfig, "restarts and max_iter must be >= 1");
    }
    const auto records = kt::run_benchmark(scenarios, methods, options->replications, options->seed, bo);
    const auto summary = kt::summarize(records);

    // Thread count is deliberately absent: output must not depend on it.
    std::ostringstream header;
    header << "# ktensors " << kt::kVersion << "\n"
           << "# grid=" << options->grid << " methods=" << methods_label(methods)
           << " replications=" << options->replications << " seed=" << options->seed
           << " restarts=" << bo.restarts << " max_iter=" << bo.max_iter << "\n"
           << "# centroids: euclidean=" << kt::centroid_rule(kt::MetricKind::kEuclidean)
           << " affine_invariant=" << kt::centroid_rule(kt::MetricKind::kAffineInvariant)
           << " log_det=" << kt::centroid_rule(kt::MetricKind::kLogDet) << "\n";
    for (const auto& s : scenarios) {
      kt::Json cj = kt::config_to_json(s);
      cj.erase("seed");
      header << "# scenario " << cj.dump() << "\n";
    }

    std::filesystem::create_directories(options->out_dir);
    const std::filesystem::path dir(options->out_dir);
    std::ostringstream results, summ, plot;
    kt::write_results_csv(results, records);
    kt::write_summary_csv(summ, summary);
    kt::write_plot_csv(plot, summary);
    kt::write_text_file((dir / "results.csv").string(), header.str() + results.str());
    kt::write_text_file((dir / "summary.csv").string(), header.str() + summ.str());
    kt::write_text_file((dir / "plot.csv").string(), header.str() + plot.str());
    if (records_written) *records_written = records.size();
  });
}

kt_status kt_projection_index(const double* psi, const double* frame, int p, double* index_out,
                              double* residual_out) {
  if (!psi || !frame || !index_out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  if (p < 1) return fail(KT_ERR_INVALID_ARGUMENT, "p must be >= 1");
  return guarded([&] {
    const auto m = kt::make_psd(read_matrix(psi, p));
    const auto b = kt::OrthonormalFrame::make(read_matrix(frame, p));
    const auto idx = kt::projection_index(m, b);
    for (int j = 0; j < p; ++j) index_out[j] = idx[j];
    if (residual_out) *residual_out = kt::residual_distance(m, b);
  });
}

kt_status kt_distance(const char* metric, const double* a, const double* b, int p, double* out) {
  if (!metric || !a || !b || !out) return fail(KT_ERR_INVALID_ARGUMENT, kNull);
  if (p < 1) return fail(KT_ERR_INVALID_ARGUMENT, "p must be >= 1");
  return guarded([&] {
    const auto ma = kt::make_psd(read_matrix(a, p));
    const auto mb = kt::make_psd(read_matrix(b, p));
    switch (kt::parse_metric(metric)) {
      case kt::MetricKind::kEuclidean: *out = kt::dist_euclidean(ma, mb); break;
      case kt::MetricKind::kAffineInvariant: *out = kt::dist_affine_invariant(ma, mb); break;
      case kt::MetricKind::kLogDet: *out = kt::dist_logdet(ma, mb); break;
    }
  });
}

}  // extern "C"
