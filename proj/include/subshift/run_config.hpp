/// @file run_config.hpp
/// @brief One JSON document configures a whole run; commands reference its
/// sections. Parsing is strict: unknown keys anywhere are rejected.

#pragma once

#include <json.hpp>
#include <string>

#include "subshift/power.hpp"
#include "subshift/sweeps.hpp"
#include "subshift/synth.hpp"
#include "subshift/train.hpp"

namespace subshift::cli {

enum class SweepKind { none, shift_strength, training_size, architecture };

struct SweepConfig {
  SweepKind kind = SweepKind::none;
  std::vector<double> w_values = {1, 5, 10, 100};
  std::vector<double> fractions = {1.0, 0.5, 0.1};
  std::vector<harness::ArchitectureVariant> variants = {
      {"default", {128, 64}},
      {"shallow", {32}},
  };
};

struct RunConfig {
  std::uint64_t root_seed = 2026;
  std::string out_dir = "results";
  harness::DataConfig data;
  synth::ShiftScenario scenario;
  harness::ExperimentConfig experiment;
  nn::TrainConfig training;         // classifier roles
  nn::TrainConfig kernel_training;  // deep kernel role
  Eigen::Index kernel_feature_dim = 128;
  SweepConfig sweep;

  RunConfig();

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  [[nodiscard]] nlohmann::json to_json() const;
  void validate() const;
};

}  // namespace subshift::cli
