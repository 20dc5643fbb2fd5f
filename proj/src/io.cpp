#include "ktensors/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace kt {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::kParse, what); }

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    parse_fail(std::string("bad field '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key);
}

}  // namespace

Json meta_json() { return Json{{"tool", "ktensors"}, {"version", kVersion}}; }

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"dim", m.rows()}, {"rows", std::move(rows)}};
}

Matrix symmetric_from_json(const Json& j) {
  const int dim = get<int>(j, "dim");
  const Json& rows = j.at("rows");
  if (dim < 1 || !rows.is_array() || static_cast<int>(rows.size()) != dim) {
    parse_fail("matrix rows do not match dim");
  }
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) parse_fail("matrix is not square");
    for (int c = 0; c < dim; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) parse_fail("matrix entry is not a number");
      m(i, c) = v.get<double>();
    }
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) parse_fail("matrix is not symmetric");
  return m;
}

PsdMatrix psd_from_json(const Json& j) {
  try {
    return PsdMatrix::make(symmetric_from_json(j), true);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    parse_fail(std::string("invalid PSD matrix: ") + e.what());
  }
}

OrthonormalFrame frame_from_json(const Json& j) {
  const int dim = get<int>(j, "dim");
  const Json& rows = j.at("rows");
  if (dim < 1 || !rows.is_array() || static_cast<int>(rows.size()) != dim) parse_fail("frame rows do not match dim");
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int c = 0; c < dim; ++c) m(i, c) = rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
  }
  try {
    return OrthonormalFrame::make(m);
  } catch (const Error& e) {
    parse_fail(std::string("invalid frame: ") + e.what());
  }
}

Json config_to_json(const ScenarioConfig& c) {
  return Json{{"id", c.id},
              {"generator", to_string(c.generator)},
              {"p", c.p},
              {"n_per_cluster", c.n_per_cluster},
              {"k", c.k},
              {"noise_level", c.noise_level},
              {"df", c.df},
              {"separation", c.separation},
              {"eigenvalue_law", Json::array({c.eig_lo, c.eig_hi})},
              {"seed", c.seed}};
}

ScenarioConfig config_from_json(const Json& j) {
  ScenarioConfig c;
  c.id = get_or<std::string>(j, "id", "");
  try {
    c.generator = parse_generator(get<std::string>(j, "generator"));
  } catch (const Error& e) {
    parse_fail(e.what());
  }
  c.p = get<int>(j, "p");
  c.n_per_cluster = get<int>(j, "n_per_cluster");
  c.k = get<int>(j, "k");
  c.noise_level = get_or<double>(j, "noise_level", 0.0);
  c.df = get_or<int>(j, "df", c.df);
  c.separation = get_or<double>(j, "separation", c.separation);
  if (j.contains("eigenvalue_law")) {
    const auto law = get<std::vector<double>>(j, "eigenvalue_law");
    if (law.size() != 2) parse_fail("eigenvalue_law must have two entries");
    c.eig_lo = law[0];
    c.eig_hi = law[1];
  }
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  return c;
}

Json sample_to_json(const LabeledSample& s) {
  Json matrices = Json::array();
  for (const auto& m : s.matrices) matrices.push_back(matrix_to_json(m.matrix()));
  Json frames = Json::array();
  for (const auto& f : s.frames) frames.push_back(matrix_to_json(f.matrix()));
  Json scales = Json::array();
  for (const auto& m : s.scales) scales.push_back(matrix_to_json(m));
  return Json{{"meta", meta_json()},
              {"config", config_to_json(s.config)},
              {"matrices", std::move(matrices)},
              {"labels", s.labels},
              {"truth", Json{{"frames", std::move(frames)},
                             {"scales", std::move(scales)},
                             {"noise_norms", s.noise_norms},
                             {"clamped", s.clamped}}}};
}

LabeledSample sample_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("matrices") || !j["matrices"].is_array()) {
    parse_fail("sample needs a 'matrices' array");
  }
  LabeledSample s;
  if (j.contains("config")) s.config = config_from_json(j["config"]);
  for (const auto& m : j["matrices"]) s.matrices.push_back(psd_from_json(m));
  if (j.contains("labels")) s.labels = get<std::vector<int>>(j, "labels");
  if (j.contains("truth") && j["truth"].is_object()) {
    const Json& t = j["truth"];
    if (t.contains("frames")) {
      for (const auto& f : t["frames"]) s.frames.push_back(frame_from_json(f));
    }
    if (t.contains("scales")) {
      for (const auto& m : t["scales"]) s.scales.push_back(symmetric_from_json(m));
    }
    if (t.contains("noise_norms")) s.noise_norms = get<std::vector<double>>(t, "noise_norms");
    if (t.contains("clamped")) s.clamped = get<int>(t, "clamped");
  }
  if (!s.labels.empty() && s.labels.size() != s.matrices.size()) {
    parse_fail("labels and matrices differ in length");
  }
  return s;
}

Json model_to_json(const ClusterModel& m) {
  Json frames = Json::array();
  for (const auto& f : m.frames) frames.push_back(matrix_to_json(f.matrix()));
  return Json{{"meta", meta_json()},
              {"method", std::string("ktensors_") + to_string(m.algorithm)},
              {"algorithm", to_string(m.algorithm)},
              {"cpc_solver", to_string(m.cpc_solver)},
              {"k", m.k},
              {"frames", std::move(frames)},
              {"assignments", m.assignments},
              {"loss", m.loss},
              {"loss_trace", m.loss_trace},
              {"iterations", m.iterations},
              {"converged", m.converged},
              {"seed", m.seed},
              {"restart", m.restart},
              {"empty_cluster_repairs", m.empty_cluster_repairs},
              {"moves", m.moves}};
}

ClusterModel cluster_model_from_json(const Json& j) {
  ClusterModel m;
  try {
    m.algorithm = parse_algorithm(get<std::string>(j, "algorithm"));
    m.cpc_solver = parse_cpc_solver(get_or<std::string>(j, "cpc_solver", "fg"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    parse_fail(e.what());
  }
  m.k = get<int>(j, "k");
  for (const auto& f : j.at("frames")) m.frames.push_back(frame_from_json(f));
  m.assignments = get<std::vector<int>>(j, "assignments");
  m.loss = get<double>(j, "loss");
  m.loss_trace = get_or<std::vector<double>>(j, "loss_trace", {});
  m.iterations = get_or<int>(j, "iterations", 0);
  m.converged = get_or<bool>(j, "converged", false);
  m.seed = get_or<std::uint64_t>(j, "seed", 0);
  m.restart = get_or<int>(j, "restart", 0);
  m.empty_cluster_repairs = get_or<int>(j, "empty_cluster_repairs", 0);
  m.moves = get_or<int>(j, "moves", 0);
  if (static_cast<int>(m.frames.size()) != m.k) parse_fail("model has k != number of frames");
  return m;
}

Json model_to_json(const BaselineModel& m) {
  Json centroids = Json::array();
  for (const auto& c : m.centroids) centroids.push_back(matrix_to_json(c.matrix()));
  return Json{{"meta", meta_json()},
              {"method", to_string(m.metric)},
              {"metric", to_string(m.metric)},
              {"centroid_rule", centroid_rule(m.metric)},
              {"k", m.k},
              {"centroids", std::move(centroids)},
              {"assignments", m.assignments},
              {"loss", m.loss},
              {"loss_trace", m.loss_trace},
              {"iterations", m.iterations},
              {"converged", m.converged},
              {"seed", m.seed},
              {"restart", m.restart},
              {"empty_cluster_repairs", m.empty_cluster_repairs}};
}

BaselineModel baseline_model_from_json(const Json& j) {
  BaselineModel m;
  try {
    m.metric = parse_metric(get<std::string>(j, "metric"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    parse_fail(e.what());
  }
  m.k = get<int>(j, "k");
  for (const auto& c : j.at("centroids")) m.centroids.push_back(psd_from_json(c));
  m.assignments = get<std::vector<int>>(j, "assignments");
  m.loss = get<double>(j, "loss");
  m.loss_trace = get_or<std::vector<double>>(j, "loss_trace", {});
  m.iterations = get_or<int>(j, "iterations", 0);
  m.converged = get_or<bool>(j, "converged", false);
  m.seed = get_or<std::uint64_t>(j, "seed", 0);
  m.restart = get_or<int>(j, "restart", 0);
  m.empty_cluster_repairs = get_or<int>(j, "empty_cluster_repairs", 0);
  return m;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, "'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(1) + "\n"); }

}  // namespace kt
