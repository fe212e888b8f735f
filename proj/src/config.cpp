#include "evonet/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "evonet/errors.hpp"

namespace evonet {

namespace {

constexpr std::uint64_t kEvolutionSeedTag = 0xe701;
constexpr std::uint64_t kTrainSeedTag = 0x7a41;
constexpr std::uint64_t kDataSeedTag = 0xda7a;

// Walks one JSON object with a fixed key set; consume() fetches and checks
// types, and finish() rejects anything left over.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (auto it = j_.find(key); it != j_.end()) {
      seen_.insert(key);
      try {
        out = it->get<T>();
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(path_ + "/" + key + ": wrong type");
      }
    }
  }

  bool has(const char* key) {
    return j_.contains(key);
  }

  const nlohmann::json* child(const char* key) {
    if (auto it = j_.find(key); it != j_.end()) {
      seen_.insert(key);
      return &*it;
    }
    return nullptr;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key()))
        throw ConfigError(path_ + ": unknown key \"" + it.key() + "\"");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::filesystem::path get_existing_path(ObjectReader& r, const char* key, const std::string& path) {
  std::string s;
  r.get(key, s);
  require(!s.empty(), path + "/" + key + ": required for idx datasets");
  std::filesystem::path p(s);
  require(std::filesystem::exists(p), path + "/" + key + ": file does not exist: " + s);
  return p;
}

DatasetSpec parse_dataset(const nlohmann::json& j) {
  ObjectReader r(j, "/dataset");
  std::string type;
  r.get("type", type);
  DatasetSpec spec;
  if (type == "idx") {
    spec.kind = DatasetSpec::Kind::kIdx;
    spec.train_images = get_existing_path(r, "train_images", "/dataset");
    spec.train_labels = get_existing_path(r, "train_labels", "/dataset");
    spec.test_images = get_existing_path(r, "test_images", "/dataset");
    spec.test_labels = get_existing_path(r, "test_labels", "/dataset");
    std::int64_t limit = 0;
    r.get("train_limit", limit);
    require(limit >= 0, "/dataset/train_limit: must be >= 0");
    spec.train_limit = limit;
    limit = 0;
    r.get("test_limit", limit);
    require(limit >= 0, "/dataset/test_limit: must be >= 0");
    spec.test_limit = limit;
  } else if (type == "blobs") {
    spec.kind = DatasetSpec::Kind::kBlobs;
    r.get("n_train", spec.n_train);
    r.get("n_test", spec.n_test);
    r.get("dim", spec.dim);
    r.get("classes", spec.classes);
    r.get("separation", spec.separation);
    require(spec.n_train > 0 && spec.n_test > 0, "/dataset: sample counts must be positive");
    require(spec.dim >= 2, "/dataset/dim: must be >= 2");
    require(spec.classes >= 2, "/dataset/classes: must be >= 2");
    require(spec.separation > 0, "/dataset/separation: must be positive");
  } else if (type == "rectangles") {
    spec.kind = DatasetSpec::Kind::kRectangles;
    r.get("n_train", spec.n_train);
    r.get("n_test", spec.n_test);
    r.get("side", spec.side);
    require(spec.n_train > 0 && spec.n_test > 0, "/dataset: sample counts must be positive");
    require(spec.side >= 8, "/dataset/side: must be >= 8");
  } else {
    throw ConfigError("/dataset/type: must be one of idx, blobs, rectangles");
  }
  r.finish();
  return spec;
}

EvolutionConfig parse_evolution(const nlohmann::json& j, std::uint64_t master_seed) {
  ObjectReader r(j, "/evolution");
  EvolutionConfig cfg;
  cfg.seed = derive_seed(master_seed, kEvolutionSeedTag);
  r.get("pop_size", cfg.pop_size);
  r.get("crossover_prob", cfg.crossover_prob);
  r.get("mutation_prob", cfg.mutation_prob);
  r.get("eta", cfg.eta);
  r.get("max_generations", cfg.max_generations);
  r.get("max_depth", cfg.max_depth);
  r.get("eval_fraction", cfg.eval_fraction);
  r.get("seed", cfg.seed);
  r.finish();
  require(cfg.pop_size >= 2, "/evolution/pop_size: must be >= 2");
  require(cfg.crossover_prob >= 0.0 && cfg.crossover_prob <= 1.0,
          "/evolution/crossover_prob: must lie in [0, 1]");
  require(cfg.mutation_prob >= 0.0 && cfg.mutation_prob <= 1.0,
          "/evolution/mutation_prob: must lie in [0, 1]");
  require(cfg.eta > 0.0, "/evolution/eta: must be positive");
  require(cfg.max_generations >= 0, "/evolution/max_generations: must be >= 0");
  require(cfg.max_depth >= 1, "/evolution/max_depth: must be >= 1");
  require(cfg.eval_fraction > 0.0 && cfg.eval_fraction <= 1.0,
          "/evolution/eval_fraction: must lie in (0, 1]");
  return cfg;
}

TrainConfig parse_train(const nlohmann::json& j, std::uint64_t master_seed) {
  ObjectReader r(j, "/train");
  TrainConfig cfg;
  cfg.seed = derive_seed(master_seed, kTrainSeedTag);
  r.get("learning_rate", cfg.learning_rate);
  r.get("batch_size", cfg.batch_size);
  r.get("max_epochs", cfg.max_epochs);
  r.get("patience", cfg.patience);
  r.get("validation_fraction", cfg.validation_fraction);
  r.get("seed", cfg.seed);
  r.finish();
  require(cfg.learning_rate > 0.0, "/train/learning_rate: must be positive");
  require(cfg.batch_size >= 1, "/train/batch_size: must be >= 1");
  require(cfg.max_epochs >= 0, "/train/max_epochs: must be >= 0");
  require(cfg.patience >= 1, "/train/patience: must be >= 1");
  require(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0,
          "/train/validation_fraction: must lie in (0, 1)");
  return cfg;
}

VisualizeConfig parse_visualize(const nlohmann::json& j) {
  ObjectReader r(j, "/visualize");
  VisualizeConfig cfg;
  r.get("units_per_layer", cfg.units_per_layer);
  r.get("iterations", cfg.iterations);
  r.get("learning_rate", cfg.learning_rate);
  r.finish();
  require(cfg.units_per_layer >= 1, "/visualize/units_per_layer: must be >= 1");
  require(cfg.iterations >= 1, "/visualize/iterations: must be >= 1");
  require(cfg.learning_rate > 0.0, "/visualize/learning_rate: must be positive");
  return cfg;
}

}  // namespace

ExperimentConfig parse_config_json(const nlohmann::json& j) {
  ObjectReader r(j, "");
  ExperimentConfig cfg;
  r.get("seed", cfg.seed);
  r.get("threads", cfg.threads);
  std::string out;
  r.get("output_dir", out);
  if (!out.empty()) cfg.output_dir = out;
  r.get("freeze_hidden", cfg.freeze_hidden);
  r.get("checkpoints", cfg.checkpoints);
  require(cfg.threads >= 1, "/threads: must be >= 1");

  const auto* dataset = r.child("dataset");
  require(dataset != nullptr, "/dataset: required");
  cfg.dataset = parse_dataset(*dataset);

  if (const auto* evo = r.child("evolution")) {
    cfg.evolution = parse_evolution(*evo, cfg.seed);
  } else {
    cfg.evolution = parse_evolution(nlohmann::json::object(), cfg.seed);
  }
  if (const auto* train = r.child("train")) {
    cfg.train = parse_train(*train, cfg.seed);
  } else {
    cfg.train = parse_train(nlohmann::json::object(), cfg.seed);
  }
  if (const auto* vis = r.child("visualize")) {
    cfg.visualize = parse_visualize(*vis);
  } else {
    cfg.visualize = VisualizeConfig{};
  }
  r.finish();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return parse_config_json(j);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json dataset;
  switch (cfg.dataset.kind) {
    case DatasetSpec::Kind::kIdx:
      dataset["type"] = "idx";
      dataset["train_images"] = cfg.dataset.train_images.string();
      dataset["train_labels"] = cfg.dataset.train_labels.string();
      dataset["test_images"] = cfg.dataset.test_images.string();
      dataset["test_labels"] = cfg.dataset.test_labels.string();
      dataset["train_limit"] = cfg.dataset.train_limit;
      dataset["test_limit"] = cfg.dataset.test_limit;
      break;
    case DatasetSpec::Kind::kBlobs:
      dataset["type"] = "blobs";
      dataset["n_train"] = cfg.dataset.n_train;
      dataset["n_test"] = cfg.dataset.n_test;
      dataset["dim"] = cfg.dataset.dim;
      dataset["classes"] = cfg.dataset.classes;
      dataset["separation"] = cfg.dataset.separation;
      break;
    case DatasetSpec::Kind::kRectangles:
      dataset["type"] = "rectangles";
      dataset["n_train"] = cfg.dataset.n_train;
      dataset["n_test"] = cfg.dataset.n_test;
      dataset["side"] = cfg.dataset.side;
      break;
  }
  return nlohmann::json{
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"output_dir", cfg.output_dir.string()},
      {"freeze_hidden", cfg.freeze_hidden},
      {"checkpoints", cfg.checkpoints},
      {"dataset", std::move(dataset)},
      {"evolution",
       {{"pop_size", cfg.evolution.pop_size},
        {"crossover_prob", cfg.evolution.crossover_prob},
        {"mutation_prob", cfg.evolution.mutation_prob},
        {"eta", cfg.evolution.eta},
        {"max_generations", cfg.evolution.max_generations},
        {"max_depth", cfg.evolution.max_depth},
        {"eval_fraction", cfg.evolution.eval_fraction},
        {"seed", cfg.evolution.seed}}},
      {"train",
       {{"learning_rate", cfg.train.learning_rate},
        {"batch_size", cfg.train.batch_size},
        {"max_epochs", cfg.train.max_epochs},
        {"patience", cfg.train.patience},
        {"validation_fraction", cfg.train.validation_fraction},
        {"seed", cfg.train.seed}}},
      {"visualize",
       {{"units_per_layer", cfg.visualize.units_per_layer},
        {"iterations", cfg.visualize.iterations},
        {"learning_rate", cfg.visualize.learning_rate}}},
  };
}

void override_seed(ExperimentConfig& cfg, std::uint64_t master_seed) {
  cfg.seed = master_seed;
  cfg.evolution.seed = derive_seed(master_seed, kEvolutionSeedTag);
  cfg.train.seed = derive_seed(master_seed, kTrainSeedTag);
}

std::pair<Dataset, Dataset> load_dataset(const DatasetSpec& spec, std::uint64_t master_seed) {
  switch (spec.kind) {
    case DatasetSpec::Kind::kIdx: {
      Dataset train = take(load_idx(spec.train_images, spec.train_labels), spec.train_limit);
      Dataset test = take(load_idx(spec.test_images, spec.test_labels), spec.test_limit);
      return {std::move(train), std::move(test)};
    }
    case DatasetSpec::Kind::kBlobs: {
      // One corpus so both halves share the same cluster centers and scaling.
      RngStream rng(derive_seed(master_seed, kDataSeedTag));
      const Dataset all =
          gen_blobs(spec.n_train + spec.n_test, spec.dim, spec.classes, spec.separation, rng);
      Dataset train = take(all, spec.n_train);
      Dataset test;
      test.X = all.X.bottomRows(spec.n_test);
      test.y.assign(all.y.end() - spec.n_test, all.y.end());
      test.num_classes = all.num_classes;
      test.name = all.name;
      return {std::move(train), std::move(test)};
    }
    case DatasetSpec::Kind::kRectangles: {
      RngStream rng(derive_seed(master_seed, kDataSeedTag));
      Dataset train = gen_rectangles(spec.n_train, spec.side, rng);
      Dataset test = gen_rectangles(spec.n_test, spec.side, rng);
      return {std::move(train), std::move(test)};
    }
  }
  throw ConfigError("load_dataset: invalid dataset kind");
}

}  // namespace evonet
