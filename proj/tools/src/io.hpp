#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>

#include "permchar/equidistribution.hpp"
#include "permchar/harness.hpp"
#include "permchar/limit_theory.hpp"
#include "permchar/multiplier.hpp"

namespace permchar::io {

inline constexpr int kConfigVersion = 1;

// Throws Error(kConfig) on any schema problem.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
MultiplierModel parse_model(const nlohmann::json& j);
JointMultiplierModel parse_joint_model(const nlohmann::json& j, std::size_t d);
// A number in [0,1) or the name of a one-dimensional preset.
double parse_point(const nlohmann::json& j);

nlohmann::json to_json(const LimitConstants& c);
nlohmann::json to_json(const CovarianceSpec& c);
nlohmann::json to_json(const DiscrepancyReport& r);
nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const ExperimentConfig& cfg, const ExperimentResult& r,
                       bool include_samples, bool include_timing);

// sample_index,point_index,re,im with normalized values.
void write_samples_csv(std::ostream& out, const ExperimentResult& r);

}  // namespace permchar::io
