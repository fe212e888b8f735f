#include "evonet/pipeline.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "evonet/errors.hpp"
#include "evonet/fitness.hpp"
#include "evonet/sha256.hpp"

namespace evonet {

namespace {

constexpr std::uint64_t kHeadSeedTag = 0x4ead;
constexpr std::uint64_t kVisSeedTag = 0x715;

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_manifest(const ExperimentConfig& cfg, const std::string& subcommand,
                    const std::vector<std::filesystem::path>& inputs) {
  nlohmann::json manifest;
  manifest["version"] = 1;
  manifest["subcommand"] = subcommand;
  manifest["seed"] = cfg.seed;
  manifest["config"] = config_to_json(cfg);
  auto& hashes = manifest["inputs"] = nlohmann::json::object();
  for (const auto& path : inputs) hashes[path.string()] = sha256_file(path);
  write_json(cfg.output_dir / ("manifest_" + subcommand + ".json"), manifest);
}

std::vector<std::filesystem::path> dataset_inputs(const DatasetSpec& spec) {
  if (spec.kind != DatasetSpec::Kind::kIdx) return {};
  return {spec.train_images, spec.train_labels, spec.test_images, spec.test_labels};
}

// Grayscale min-max render of one optimized input, square when possible.
void write_pgm(const std::filesystem::path& path, const Vector& v) {
  Eigen::Index width = v.size(), height = 1;
  const auto side = static_cast<Eigen::Index>(std::lround(std::sqrt(double(v.size()))));
  if (side * side == v.size()) {
    width = side;
    height = side;
  }
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  const double range = hi - lo;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double scaled = range < 1e-12 ? 0.0 : (v[i] - lo) / range;
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(scaled * 255.0))));
  }
}

void run_evolve(const ExperimentConfig& cfg, const Dataset& train) {
  LayerCheckpointSink sink;
  if (cfg.checkpoints) {
    sink = [&](int layer, int generation, const nlohmann::json& doc) {
      nlohmann::json with_layer = doc;
      with_layer["layer"] = layer;
      write_json(cfg.output_dir / ("checkpoint_layer" + std::to_string(layer) + "_gen" +
                                   std::to_string(generation) + ".json"),
                 with_layer);
    };
  }
  const StackEvolutionResult result =
      evolve_stack(train, cfg.evolution, cfg.threads, cfg.checkpoints ? &sink : nullptr);

  if (result.stopped_early)
    std::cerr << "evolve: stacking stopped early, representation narrowed below 2 dimensions\n";
  write_json(cfg.output_dir / "phenotypes.json", phenotypes_to_json(result.layers));
  for (std::size_t i = 0; i < result.histories.size(); ++i)
    write_history_csv(cfg.output_dir / ("ga_history_layer" + std::to_string(i) + ".csv"),
                      result.histories[i]);
  std::cout << "evolve: " << result.layers.size() << " layer(s) written to "
            << (cfg.output_dir / "phenotypes.json").string() << '\n';
}

void run_finetune(const ExperimentConfig& cfg, const Dataset& train) {
  const auto layers = phenotypes_from_json(read_json(cfg.output_dir / "phenotypes.json"));
  if (layers.empty()) throw DataError("finetune: phenotypes.json holds no layers");
  RngStream head_rng(derive_seed(cfg.train.seed, kHeadSeedTag));
  NetworkStack stack = assemble(layers, train.num_classes, head_rng);
  RngStream train_rng(cfg.train.seed);
  auto [tuned, history] = finetune(stack, train, cfg.train, train_rng, cfg.freeze_hidden);
  write_json(cfg.output_dir / "model.json", stack_to_json(tuned));
  write_train_history_csv(cfg.output_dir / "train_history.csv", history);
  std::cout << "finetune: best epoch " << history.best_epoch << ", validation CCR "
            << history.epochs[static_cast<std::size_t>(history.best_epoch)].valid_ccr << '\n';
}

void run_evaluate(const ExperimentConfig& cfg, const Dataset& test) {
  const NetworkStack stack = stack_from_json(read_json(cfg.output_dir / "model.json"));
  const double test_ccr = ccr(predict(stack, test.X), test.y);
  write_json(cfg.output_dir / "metrics.json", nlohmann::json{{"test_ccr", test_ccr}});
  std::cout << "evaluate: test CCR " << test_ccr << '\n';
}

void run_visualize(const ExperimentConfig& cfg) {
  const NetworkStack stack = stack_from_json(read_json(cfg.output_dir / "model.json"));
  const auto vis_dir = cfg.output_dir / "vis";
  std::filesystem::create_directories(vis_dir);
  std::ofstream csv(vis_dir / "activations.csv");
  if (!csv) throw DataError("cannot write visualization csv");
  csv << "layer,unit,objective,image\n";
  for (int depth = 1; depth <= static_cast<int>(stack.layers.size()); ++depth) {
    const auto k = stack.layers[static_cast<std::size_t>(depth - 1)].output_dim();
    RngStream pick_rng(derive_seed(cfg.seed, kVisSeedTag, static_cast<std::uint64_t>(depth)));
    const auto units = pick_rng.sample_without_replacement(
        k, std::min<Eigen::Index>(k, cfg.visualize.units_per_layer));
    for (const auto unit : units) {
      RngStream rng(derive_seed(cfg.seed, kVisSeedTag, static_cast<std::uint64_t>(depth),
                                static_cast<std::uint64_t>(unit)));
      std::vector<double> trace;
      const Vector input =
          activation_maximization(stack, depth, static_cast<int>(unit), cfg.visualize.iterations,
                                  cfg.visualize.learning_rate, rng, &trace);
      const std::string image =
          "layer" + std::to_string(depth) + "_unit" + std::to_string(unit) + ".pgm";
      write_pgm(vis_dir / image, input);
      csv << depth << ',' << unit << ',' << (trace.empty() ? 0.0 : trace.back()) << ',' << image
          << '\n';
    }
  }
  std::cout << "visualize: images written to " << vis_dir.string() << '\n';
}

}  // namespace

int run_pipeline(const ExperimentConfig& cfg, const std::string& subcommand) {
  const bool full = subcommand == "full";
  if (!full && subcommand != "evolve" && subcommand != "finetune" && subcommand != "evaluate" &&
      subcommand != "visualize")
    throw ConfigError("unknown subcommand: " + subcommand);

  std::filesystem::create_directories(cfg.output_dir);
  auto [train, test] = load_dataset(cfg.dataset, cfg.seed);

  std::vector<std::filesystem::path> inputs = dataset_inputs(cfg.dataset);
  if (subcommand == "finetune") inputs.push_back(cfg.output_dir / "phenotypes.json");
  if (subcommand == "evaluate" || subcommand == "visualize")
    inputs.push_back(cfg.output_dir / "model.json");

  if (full || subcommand == "evolve") run_evolve(cfg, train);
  if (full || subcommand == "finetune") run_finetune(cfg, train);
  if (full || subcommand == "evaluate") run_evaluate(cfg, test);
  if (full || subcommand == "visualize") run_visualize(cfg);

  write_manifest(cfg, subcommand, inputs);
  return kExitOk;
}

}  // namespace evonet
