#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "evonet/evolution.hpp"
#include "evonet/network.hpp"

namespace evonet {

struct DatasetSpec {
  enum class Kind { kIdx, kBlobs, kRectangles };
  Kind kind = Kind::kBlobs;

  // idx
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  Eigen::Index train_limit = 0;  // 0 = all rows
  Eigen::Index test_limit = 0;

  // generators
  int n_train = 400;
  int n_test = 200;
  int dim = 4;           // blobs
  int classes = 2;       // blobs
  double separation = 10.0;  // blobs
  int side = 28;         // rectangles

  bool operator==(const DatasetSpec&) const = default;
};

struct VisualizeConfig {
  int units_per_layer = 100;
  int iterations = 10000;
  double learning_rate = 0.1;

  bool operator==(const VisualizeConfig&) const = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  int threads = 1;
  std::filesystem::path output_dir = "out";
  bool freeze_hidden = false;
  bool checkpoints = false;
  DatasetSpec dataset;
  EvolutionConfig evolution;
  TrainConfig train;
  VisualizeConfig visualize;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates a JSON experiment configuration. Missing optional
// fields take their defaults; nested seeds default to values derived from the
// top-level seed; unknown keys and out-of-range values raise ConfigError with
// the offending JSON path. Referenced dataset files must exist.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Re-derives the nested evolution/train seeds from a new master seed.
void override_seed(ExperimentConfig& cfg, std::uint64_t master_seed);

// Materializes the configured dataset pair (train, test).
std::pair<Dataset, Dataset> load_dataset(const DatasetSpec& spec, std::uint64_t master_seed);

}  // namespace evonet
