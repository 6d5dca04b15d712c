#pragma once

#include <string>

#include <json.hpp>

#include "cpd/baseline.hpp"
#include "cpd/calibrate.hpp"
#include "cpd/detect.hpp"
#include "cpd/experiment.hpp"
#include "cpd/model.hpp"

namespace cpd {

using json = nlohmann::json;

json to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const json& j);

json to_json(const DetectionConfig& config);
DetectionConfig detection_config_from_json(const json& j);

json to_json(const DetectionResult& result, std::size_t n);
json to_json(const SupWaldResult& result);
json to_json(const ThresholdEstimate& estimate);
json to_json(const ExperimentReport& report);

ExperimentConfig experiment_config_from_json(const json& j);

/// Sample CSV: header "t,x1..xK,y1..yM", one row per observation, t = n/N.
std::string sample_to_csv(const Sample& sample);
Sample sample_from_csv(const std::string& text);

} // namespace cpd
