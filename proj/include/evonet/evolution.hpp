#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "evonet/data.hpp"
#include "evonet/fitness.hpp"
#include "evonet/genome.hpp"

namespace evonet {

struct EvolutionConfig {
  int pop_size = 50;
  double crossover_prob = 0.9;
  double mutation_prob = 0.1;
  double eta = 20.0;  // polynomial mutation distribution index
  int max_generations = 30;
  int max_depth = 5;
  double eval_fraction = 0.10;
  std::uint64_t seed = 0;

  bool operator==(const EvolutionConfig&) const = default;
};

struct GenerationRecord {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  Chromosome best_chromosome;
};

struct Individual {
  Chromosome chrom;
  double fitness = 0.0;
};

struct LayerEvolutionResult {
  LayerPhenotype best;
  std::vector<GenerationRecord> history;
};

struct StackEvolutionResult {
  std::vector<LayerPhenotype> layers;
  std::vector<std::vector<GenerationRecord>> histories;
  bool stopped_early = false;
};

// Receives (generation, checkpoint document) once per generation when
// installed on evolve_layer.
using CheckpointSink = std::function<void(int, const nlohmann::json&)>;

// Stack-level variant that also reports the layer index.
using LayerCheckpointSink = std::function<void(int, int, const nlohmann::json&)>;

// Fitter of two distinct uniformly drawn indices; ties resolved by a fair
// coin. Needs at least two entries.
int binary_tournament(const std::vector<double>& fitnesses, RngStream& rng);

// Elitism plus m-1 repeated binary tournaments over the remaining pool (with
// replacement between tournaments). Q may be empty.
std::vector<Individual> environmental_selection(const std::vector<Individual>& parents,
                                                const std::vector<Individual>& offspring, int m,
                                                RngStream& rng);

// The per-layer GA: seeded population, per-generation offspring via binary
// tournament + crossover + mutation, environmental selection, fixed
// generation budget. Fitness values travel with individuals; new candidates
// are evaluated on a fresh per-generation evaluation subset. After the loop
// the final population is re-evaluated on a fresh subset and the best
// individual is decoded. history holds one record per generation boundary
// (including the initial population), so best_fitness is non-decreasing.
LayerEvolutionResult evolve_layer(const Matrix& X, const std::vector<int>& y, const BasisSet& basis,
                                  const EvolutionConfig& cfg,
                                  const std::vector<LayerPhenotype>& upstream, int threads = 1,
                                  const CheckpointSink* checkpoint = nullptr);

// Layer-wise outer loop: evolve a layer, transform the working data through
// it, repeat up to cfg.max_depth times. Stops early (with stopped_early set)
// when a layer narrows the representation below 2 dimensions.
StackEvolutionResult evolve_stack(const Dataset& train, const EvolutionConfig& cfg, int threads = 1,
                                  const LayerCheckpointSink* checkpoint = nullptr);

// generation,best_fitness,mean_fitness
void write_history_csv(const std::filesystem::path& path, const std::vector<GenerationRecord>& history);

nlohmann::json population_checkpoint_json(std::uint64_t seed, int generation,
                                          const std::vector<Individual>& population);

}  // namespace evonet
