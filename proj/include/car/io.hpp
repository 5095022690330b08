#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "car/coarsening.hpp"
#include "car/factorize.hpp"
#include "car/mechanisms.hpp"
#include "car/polar.hpp"
#include "car/stat_tests.hpp"

namespace car::io {

/// Model file: {"y_labels": [...], "x_labels": [...], "joint": [[rows=Y]]}.
/// Optional "q0"/"p0" arrays must match the computed marginals within 1e-9.
CoarseningJoint load_model(const std::string& path);
CoarseningJoint model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const CoarseningJoint& j);
void save_model(const CoarseningJoint& j, const std::string& path);

/// Vector-on-a-space file: {"labels": [...], "weights": [...], "values":
/// [...]}; labels are optional when the vector is paired with a model space
/// (positional matching applies).
struct VectorFile {
  std::optional<std::vector<std::string>> labels;
  Eigen::VectorXd weights;
  Eigen::VectorXd values;
};
VectorFile load_vector(const std::string& path);

/// Interprets a vector file against a model space; labels (when present) and
/// weights must match.
Eigen::VectorXd bind_vector(const VectorFile& file, const BaseSpace& space);
Density bind_density(const VectorFile& file, const BaseSpacePtr& space);

nlohmann::json density_to_json(const Density& d);
void save_density(const Density& d, const std::string& path);

/// Samples CSV: header "x_index" (0-based index into the model's x_labels)
/// for finite mechanisms or "x_value" for the continuous sampler.
SampleBatch load_samples(const std::string& path);
void save_samples(const SampleBatch& batch, const std::string& path);

nlohmann::json operator_check_to_json(const OperatorCheck& check);
nlohmann::json polar_to_json(const PolarDescription& desc);
nlohmann::json membership_to_json(const MembershipCert& cert);
nlohmann::json bipolar_to_json(const BipolarVerdict& verdict);
nlohmann::json factorization_to_json(const FactorizationReport& report);
nlohmann::json test_report_to_json(const TestReport& report);

}  // namespace car::io
