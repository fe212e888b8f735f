#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "evonet/activation.hpp"
#include "evonet/rng.hpp"
#include "evonet/subspace.hpp"

namespace evonet {

// Three-part genotype for one layer: real coefficients in [-1, 1] that place
// the main basis vector a1, a bit mask selecting null-space vectors a2..an,
// and a 2-bit activation gene (valid values 0..2 after repair).
struct Chromosome {
  Vector coeffs;                   // length n
  std::vector<std::uint8_t> mask;  // length n - 1, entries in {0, 1}
  int act_bits = 0;                // 0..3

  Eigen::Index dim() const { return coeffs.size(); }
  bool operator==(const Chromosome& other) const;
};

// Decoded layer: k x n weight matrix (a1 plus the selected null-space rows,
// k = 1 + popcount(mask)) and the activation choice.
struct LayerPhenotype {
  Matrix weights;  // k x n
  Activation activation = Activation::kSigmoid;

  Eigen::Index input_dim() const { return weights.cols(); }
  Eigen::Index output_dim() const { return weights.rows(); }
};

// Coefficients i.i.d. uniform on [-1, 1], fair-coin mask bits, activation
// uniform on {0, 1, 2}.
Chromosome random_chromosome(int n, RngStream& rng);

// Builds the phenotype for a repaired chromosome against a fixed basis. If
// the combined a1 is numerically zero the coefficients are re-sampled from a
// stream derived from the chromosome contents (so decode stays a pure
// function of its arguments); after 64 failed retries a NumericError is
// thrown.
LayerPhenotype decode(const Chromosome& chrom, const BasisSet& basis);

// One-point crossover: parts 1+2 form one gene string of length 2n-1 cut at
// a uniform interior point; the two activation bits are exchanged at their
// single interior cut. Children may carry act_bits == 3 and need repair.
std::pair<Chromosome, Chromosome> one_point_crossover(const Chromosome& p1, const Chromosome& p2,
                                                      RngStream& rng);

// Deterministic core of the crossover with explicit cut points,
// cut_main in [1, 2n-1), cut_act in {1}.
std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& p1, const Chromosome& p2,
                                               int cut_main, int cut_act);

// With probability mutation_prob the chromosome is mutated: each coefficient
// independently undergoes polynomial mutation (index eta, bounds [-1, 1])
// with probability 0.5, and each mask/activation bit flips with probability
// 0.5. The result is passed through repair_activation.
Chromosome mutate(const Chromosome& chrom, RngStream& rng, double mutation_prob, double eta);

// Resets act_bits to a uniform draw from {0, 1, 2} when it is 3.
Chromosome repair_activation(const Chromosome& chrom, RngStream& rng);

// Bounded two-sided polynomial mutation of a single gene.
double polynomial_mutation(double x, double eta, double lo, double hi, RngStream& rng);

nlohmann::json chromosome_to_json(const Chromosome& chrom);
Chromosome chromosome_from_json(const nlohmann::json& j);

}  // namespace evonet
