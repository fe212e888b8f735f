#include "evonet/evolution.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "evonet/errors.hpp"

namespace evonet {

namespace {

// Tags for deriving independent rng streams from the layer seed.
enum StreamTag : std::uint64_t {
  kTagInit = 1,
  kTagSubset = 2,
  kTagOffspring = 3,
  kTagFitness = 4,
  kTagFinalSubset = 5,
  kTagBasis = 6,
  kTagLayer = 7,
};

// Evaluates fitness for the given individuals on a shared evaluation subset.
// Each individual draws from its own stream, so the result is identical for
// any thread count.
void evaluate_individuals(std::vector<Individual>& pop, const std::vector<std::size_t>& which,
                          const BasisSet& basis, const Matrix& upstream_eval,
                          const std::vector<int>& y_eval, std::uint64_t seed, int generation,
                          int threads) {
  auto eval_range = [&](std::size_t begin, std::size_t step) {
    for (std::size_t w = begin; w < which.size(); w += step) {
      const std::size_t i = which[w];
      RngStream rng(derive_seed(seed, kTagFitness, static_cast<std::uint64_t>(generation),
                                static_cast<std::uint64_t>(i)));
      pop[i].fitness = fitness_on_subset(pop[i].chrom, basis, upstream_eval, y_eval, rng);
    }
  };
  if (threads <= 1 || which.size() <= 1) {
    eval_range(0, 1);
    return;
  }
  const auto n_workers = static_cast<std::size_t>(threads);
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) workers.emplace_back(eval_range, t, n_workers);
  for (auto& w : workers) w.join();
}

std::size_t best_index(const std::vector<Individual>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i)
    if (pop[i].fitness > pop[best].fitness) best = i;
  return best;
}

GenerationRecord make_record(int generation, const std::vector<Individual>& pop) {
  GenerationRecord rec;
  rec.generation = generation;
  const std::size_t b = best_index(pop);
  rec.best_fitness = pop[b].fitness;
  rec.best_chromosome = pop[b].chrom;
  double sum = 0.0;
  for (const auto& ind : pop) sum += ind.fitness;
  rec.mean_fitness = sum / static_cast<double>(pop.size());
  return rec;
}

}  // namespace

int binary_tournament(const std::vector<double>& fitnesses, RngStream& rng) {
  const auto n = static_cast<std::int64_t>(fitnesses.size());
  if (n < 2) throw NumericError("binary_tournament: need at least 2 entries");
  const auto i = rng.uniform_int(0, n - 1);
  auto j = rng.uniform_int(0, n - 2);
  if (j >= i) ++j;  // two distinct uniform indices
  const double fi = fitnesses[static_cast<std::size_t>(i)];
  const double fj = fitnesses[static_cast<std::size_t>(j)];
  if (fi > fj) return static_cast<int>(i);
  if (fj > fi) return static_cast<int>(j);
  return static_cast<int>(rng.coin() ? i : j);
}

std::vector<Individual> environmental_selection(const std::vector<Individual>& parents,
                                                const std::vector<Individual>& offspring, int m,
                                                RngStream& rng) {
  std::vector<Individual> pool = parents;
  pool.insert(pool.end(), offspring.begin(), offspring.end());
  if (pool.empty()) throw NumericError("environmental_selection: empty pool");

  const std::size_t elite = best_index(pool);
  std::vector<Individual> next;
  next.reserve(static_cast<std::size_t>(m));
  next.push_back(pool[elite]);

  std::vector<Individual> rest;
  std::vector<double> rest_fitness;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i == elite) continue;
    rest.push_back(pool[i]);
    rest_fitness.push_back(pool[i].fitness);
  }
  for (int s = 1; s < m; ++s) {
    if (rest.empty()) throw NumericError("environmental_selection: pool smaller than population size");
    if (rest.size() == 1) {
      next.push_back(rest[0]);
      continue;
    }
    next.push_back(rest[static_cast<std::size_t>(binary_tournament(rest_fitness, rng))]);
  }
  return next;
}

LayerEvolutionResult evolve_layer(const Matrix& X, const std::vector<int>& y, const BasisSet& basis,
                                  const EvolutionConfig& cfg,
                                  const std::vector<LayerPhenotype>& upstream, int threads,
                                  const CheckpointSink* checkpoint) {
  if (X.rows() < 10) throw DataError("evolve_layer: need at least 10 training rows");
  if (X.cols() != basis.dim())
    throw NumericError("evolve_layer: data dimension does not match the basis");
  if (cfg.pop_size < 2) throw ConfigError("evolve_layer: population size must be >= 2");

  const int n = static_cast<int>(X.cols());
  const int m = cfg.pop_size;
  const std::uint64_t seed = cfg.seed;
  const Matrix upstream_all = forward_stack(upstream, X);

  auto sample_generation_subset = [&](std::uint64_t tag, int generation) {
    RngStream rng(derive_seed(seed, tag, static_cast<std::uint64_t>(generation)));
    LabeledSubset subset = sample_eval_subset(upstream_all, y, cfg.eval_fraction, rng);
    return subset;
  };

  // Initial population, evaluated on the generation-0 subset.
  std::vector<Individual> pop(static_cast<std::size_t>(m));
  std::vector<std::size_t> all_indices(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < pop.size(); ++i) {
    RngStream rng(derive_seed(seed, kTagInit, static_cast<std::uint64_t>(i)));
    pop[i].chrom = random_chromosome(n, rng);
    all_indices[i] = i;
  }
  {
    const LabeledSubset subset = sample_generation_subset(kTagSubset, 0);
    evaluate_individuals(pop, all_indices, basis, subset.X, subset.y, seed, 0, threads);
  }

  LayerEvolutionResult result;
  result.history.push_back(make_record(0, pop));
  if (checkpoint) (*checkpoint)(0, population_checkpoint_json(seed, 0, pop));

  for (int g = 1; g <= cfg.max_generations; ++g) {
    RngStream var_rng(derive_seed(seed, kTagOffspring, static_cast<std::uint64_t>(g)));
    std::vector<double> fitnesses(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) fitnesses[i] = pop[i].fitness;

    std::vector<Individual> offspring;
    offspring.reserve(static_cast<std::size_t>(m));
    while (offspring.size() < static_cast<std::size_t>(m)) {
      const auto& p1 = pop[static_cast<std::size_t>(binary_tournament(fitnesses, var_rng))].chrom;
      const auto& p2 = pop[static_cast<std::size_t>(binary_tournament(fitnesses, var_rng))].chrom;
      std::pair<Chromosome, Chromosome> children =
          var_rng.coin(cfg.crossover_prob) ? one_point_crossover(p1, p2, var_rng)
                                           : std::make_pair(p1, p2);
      for (auto* child : {&children.first, &children.second}) {
        if (offspring.size() >= static_cast<std::size_t>(m)) break;
        Chromosome c = mutate(*child, var_rng, cfg.mutation_prob, cfg.eta);
        c = repair_activation(c, var_rng);  // crossover alone can leave 3
        offspring.push_back(Individual{std::move(c), 0.0});
      }
    }

    // New candidates are scored on this generation's subset; survivors keep
    // their values so the recorded best can never move backwards.
    const LabeledSubset subset = sample_generation_subset(kTagSubset, g);
    std::vector<std::size_t> fresh(offspring.size());
    for (std::size_t i = 0; i < offspring.size(); ++i) fresh[i] = i;
    evaluate_individuals(offspring, fresh, basis, subset.X, subset.y, seed, g, threads);

    RngStream select_rng(derive_seed(seed, kTagOffspring, static_cast<std::uint64_t>(g), 0x5e1ec7ULL));
    pop = environmental_selection(pop, offspring, m, select_rng);
    result.history.push_back(make_record(g, pop));
    if (checkpoint) (*checkpoint)(g, population_checkpoint_json(seed, g, pop));
  }

  // Post-loop evaluation on a fresh subset decides the returned individual.
  {
    const LabeledSubset subset = sample_generation_subset(kTagFinalSubset, cfg.max_generations);
    std::vector<Individual> final_pop = pop;
    evaluate_individuals(final_pop, all_indices, basis, subset.X, subset.y, seed,
                         cfg.max_generations + 1, threads);
    result.best = decode(final_pop[best_index(final_pop)].chrom, basis);
  }
  return result;
}

StackEvolutionResult evolve_stack(const Dataset& train, const EvolutionConfig& cfg, int threads,
                                  const LayerCheckpointSink* checkpoint) {
  if (cfg.max_depth < 1) throw ConfigError("evolve_stack: max_depth must be >= 1");
  StackEvolutionResult result;
  Matrix working = train.X;
  for (int layer = 0; layer < cfg.max_depth; ++layer) {
    const auto n = working.cols();
    if (n < 2) {
      result.stopped_early = true;
      break;
    }
    const std::uint64_t layer_seed = derive_seed(cfg.seed, kTagLayer, static_cast<std::uint64_t>(layer));
    RngStream basis_rng(derive_seed(layer_seed, kTagBasis));
    const BasisSet basis = generate_orthogonal_basis(static_cast<int>(n), basis_rng);

    EvolutionConfig layer_cfg = cfg;
    layer_cfg.seed = layer_seed;
    CheckpointSink layer_sink;
    if (checkpoint)
      layer_sink = [&, layer](int generation, const nlohmann::json& doc) {
        (*checkpoint)(layer, generation, doc);
      };
    // The working data has already been transformed, so upstream is empty.
    LayerEvolutionResult layer_result = evolve_layer(working, train.y, basis, layer_cfg, {}, threads,
                                                     checkpoint ? &layer_sink : nullptr);
    working = forward_layer(layer_result.best, working);
    result.layers.push_back(std::move(layer_result.best));
    result.histories.push_back(std::move(layer_result.history));
  }
  return result;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<GenerationRecord>& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write history csv " + path.string());
  out << "generation,best_fitness,mean_fitness\n";
  for (const auto& rec : history)
    out << rec.generation << ',' << rec.best_fitness << ',' << rec.mean_fitness << '\n';
}

nlohmann::json population_checkpoint_json(std::uint64_t seed, int generation,
                                          const std::vector<Individual>& population) {
  nlohmann::json j;
  j["generation"] = generation;
  j["rng"] = {{"seed", seed}, {"generation", generation}};
  auto& pop = j["population"] = nlohmann::json::array();
  for (const auto& ind : population) {
    pop.push_back({{"chromosome", chromosome_to_json(ind.chrom)}, {"fitness", ind.fitness}});
  }
  return j;
}

}  // namespace evonet
