#pragma once

#include <string>

#include <json.hpp>

#include "ktensors/baselines.hpp"
#include "ktensors/clustering.hpp"
#include "ktensors/simgen.hpp"

namespace kt {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// {"tool": "ktensors", "version": ...}
Json meta_json();

/// Matrix object: {"dim": p, "rows": [[...], ...]} in row-major order.
Json matrix_to_json(const Matrix& m);
/// Throws kParse on malformed objects and when the matrix is not symmetric
/// within 1e-9 absolute.
Matrix symmetric_from_json(const Json& j);
PsdMatrix psd_from_json(const Json& j);
OrthonormalFrame frame_from_json(const Json& j);

Json config_to_json(const ScenarioConfig& c);
ScenarioConfig config_from_json(const Json& j);

/// {meta, config, matrices, labels, truth: {frames, scales}}
Json sample_to_json(const LabeledSample& s);
/// Only "matrices" is required; config, labels and truth are optional.
LabeledSample sample_from_json(const Json& j);

Json model_to_json(const ClusterModel& m);
ClusterModel cluster_model_from_json(const Json& j);
Json model_to_json(const BaselineModel& m);
BaselineModel baseline_model_from_json(const Json& j);

Json read_json_file(const std::string& path);               // kIo / kParse
void write_json_file(const std::string& path, const Json& j);  // kIo
void write_text_file(const std::string& path, const std::string& text);

}  // namespace kt
