#pragma once

#include <string>

#include "evonet/config.hpp"

namespace evonet {

// Exit codes reported by the CLI; errors map by category.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigError = 2,
  kExitDataError = 3,
  kExitNumericError = 4,
};

// Runs one subcommand (evolve, finetune, evaluate, visualize or full) against
// the configuration. Artifacts land in cfg.output_dir under fixed names:
// phenotypes.json and ga_history_layer<i>.csv from evolve, model.json and
// train_history.csv from finetune, metrics.json from evaluate, vis/ from
// visualize. Every run writes manifest_<subcommand>.json recording the
// resolved config, seed, and content hashes of its file inputs.
int run_pipeline(const ExperimentConfig& cfg, const std::string& subcommand);

}  // namespace evonet
