#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evonet/errors.hpp"
#include "evonet/pipeline.hpp"

namespace {

int threads_from_env() {
  if (const char* env = std::getenv("EVONET_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evonet - evolves unsupervised feedforward networks and fine-tunes them"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;

  const std::vector<std::string> names = {"evolve", "finetune", "evaluate", "visualize", "full"};
  const std::vector<std::string> descriptions = {
      "stage 1: evolve layer weights and activations",
      "stage 2: fine-tune saved phenotypes with a softmax head",
      "test CCR of a saved model",
      "activation-maximization images for a saved model",
      "all stages in order",
  };
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option_function<std::uint64_t>(
           "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; },
           "override the master seed");
    sub->add_option("--threads", threads, "worker threads for fitness evaluation");
    sub->add_option("--out", out_dir, "override the output directory");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    evonet::ExperimentConfig cfg = evonet::parse_config(config_path);
    if (seed_set) evonet::override_seed(cfg, seed);
    if (threads >= 1) {
      cfg.threads = threads;
    } else if (const int env_threads = threads_from_env(); env_threads >= 1 && cfg.threads == 1) {
      cfg.threads = env_threads;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    return evonet::run_pipeline(cfg, app.get_subcommands().front()->get_name());
  } catch (const evonet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return evonet::kExitConfigError;
  } catch (const evonet::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return evonet::kExitDataError;
  } catch (const evonet::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return evonet::kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return evonet::kExitFailure;
  }
}
