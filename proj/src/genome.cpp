#include "evonet/genome.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

#include "evonet/errors.hpp"

namespace evonet {

namespace {

// FNV-1a over the chromosome bytes; seeds the deterministic re-sampling
// stream used by decode when a1 collapses to zero.
std::uint64_t chromosome_hash(const Chromosome& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto eat = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (Eigen::Index i = 0; i < c.coeffs.size(); ++i) {
    std::uint64_t bits;
    const double v = c.coeffs[i];
    std::memcpy(&bits, &v, sizeof bits);
    eat(&bits, sizeof bits);
  }
  if (!c.mask.empty()) eat(c.mask.data(), c.mask.size());
  eat(&c.act_bits, sizeof c.act_bits);
  return h;
}

}  // namespace

bool Chromosome::operator==(const Chromosome& other) const {
  return act_bits == other.act_bits && mask == other.mask && coeffs.size() == other.coeffs.size() &&
         coeffs == other.coeffs;
}

Chromosome random_chromosome(int n, RngStream& rng) {
  if (n < 2) throw NumericError("random_chromosome: dimension must be >= 2, got " + std::to_string(n));
  Chromosome c;
  c.coeffs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) c.coeffs[i] = rng.uniform(-1.0, 1.0);
  c.mask.resize(static_cast<std::size_t>(n) - 1);
  for (auto& bit : c.mask) bit = rng.coin() ? 1 : 0;
  c.act_bits = static_cast<int>(rng.uniform_int(0, 2));
  return c;
}

LayerPhenotype decode(const Chromosome& chrom, const BasisSet& basis) {
  if (chrom.dim() != basis.rows())
    throw NumericError("decode: chromosome dimension " + std::to_string(chrom.dim()) +
                       " does not match basis with " + std::to_string(basis.rows()) + " vectors");
  Vector a1 = combine(basis, chrom.coeffs);
  if (a1.norm() <= kZeroVectorThreshold) {
    RngStream retry(derive_seed(chromosome_hash(chrom), 0x7265747279ULL));
    int attempts = 0;
    Vector coeffs = chrom.coeffs;
    while (a1.norm() <= kZeroVectorThreshold) {
      if (++attempts > 64) throw NumericError("decode: could not re-sample a nonzero a1");
      for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs[i] = retry.uniform(-1.0, 1.0);
      a1 = combine(basis, coeffs);
    }
  }
  const BasisSet null_rows = null_space_basis(a1);

  Eigen::Index k = 1;
  for (auto bit : chrom.mask) k += bit ? 1 : 0;
  Matrix weights(k, a1.size());
  weights.row(0) = a1.transpose();
  Eigen::Index row = 1;
  for (std::size_t i = 0; i < chrom.mask.size(); ++i) {
    if (chrom.mask[i]) weights.row(row++) = null_rows.vectors.row(static_cast<Eigen::Index>(i));
  }
  return LayerPhenotype{std::move(weights), activation_from_bits(chrom.act_bits)};
}

std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& p1, const Chromosome& p2, int cut_main,
                                               int cut_act) {
  const Eigen::Index n = p1.dim();
  if (n != p2.dim()) throw NumericError("crossover: parent dimensions differ");
  const int genes = static_cast<int>(2 * n - 1);
  if (cut_main < 1 || cut_main >= genes) throw NumericError("crossover: cut point out of range");
  if (cut_act != 1) throw NumericError("crossover: activation cut must be 1");

  Chromosome c1 = p1;
  Chromosome c2 = p2;
  // Parts 1 and 2 are one concatenated string; swap everything after the cut.
  for (int pos = cut_main; pos < genes; ++pos) {
    if (pos < n) {
      std::swap(c1.coeffs[pos], c2.coeffs[pos]);
    } else {
      std::swap(c1.mask[static_cast<std::size_t>(pos - n)], c2.mask[static_cast<std::size_t>(pos - n)]);
    }
  }
  // Part 3: two bits, single interior cut; swap the low bit.
  const int hi1 = (p1.act_bits >> 1) & 1, lo1 = p1.act_bits & 1;
  const int hi2 = (p2.act_bits >> 1) & 1, lo2 = p2.act_bits & 1;
  c1.act_bits = (hi1 << 1) | lo2;
  c2.act_bits = (hi2 << 1) | lo1;
  return {std::move(c1), std::move(c2)};
}

std::pair<Chromosome, Chromosome> one_point_crossover(const Chromosome& p1, const Chromosome& p2,
                                                      RngStream& rng) {
  const int genes = static_cast<int>(2 * p1.dim() - 1);
  const int cut = static_cast<int>(rng.uniform_int(1, genes - 1));
  return crossover_at(p1, p2, cut, 1);
}

double polynomial_mutation(double x, double eta, double lo, double hi, RngStream& rng) {
  const double span = hi - lo;
  const double u = rng.uniform01();
  const double mut_pow = 1.0 / (eta + 1.0);
  double deltaq;
  if (u <= 0.5) {
    const double delta1 = (x - lo) / span;
    const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - delta1, eta + 1.0);
    deltaq = std::pow(val, mut_pow) - 1.0;
  } else {
    const double delta2 = (hi - x) / span;
    const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - delta2, eta + 1.0);
    deltaq = 1.0 - std::pow(val, mut_pow);
  }
  return std::clamp(x + deltaq * span, lo, hi);
}

Chromosome mutate(const Chromosome& chrom, RngStream& rng, double mutation_prob, double eta) {
  if (!rng.coin(mutation_prob)) return chrom;
  Chromosome c = chrom;
  for (Eigen::Index i = 0; i < c.coeffs.size(); ++i) {
    if (rng.coin()) c.coeffs[i] = polynomial_mutation(c.coeffs[i], eta, -1.0, 1.0, rng);
  }
  for (auto& bit : c.mask) {
    if (rng.coin()) bit ^= 1;
  }
  int hi = (c.act_bits >> 1) & 1, lo = c.act_bits & 1;
  if (rng.coin()) hi ^= 1;
  if (rng.coin()) lo ^= 1;
  c.act_bits = (hi << 1) | lo;
  return repair_activation(c, rng);
}

Chromosome repair_activation(const Chromosome& chrom, RngStream& rng) {
  if (chrom.act_bits != 3) return chrom;
  Chromosome c = chrom;
  c.act_bits = static_cast<int>(rng.uniform_int(0, 2));
  return c;
}

nlohmann::json chromosome_to_json(const Chromosome& chrom) {
  nlohmann::json j;
  j["coeffs"] = std::vector<double>(chrom.coeffs.data(), chrom.coeffs.data() + chrom.coeffs.size());
  j["mask"] = std::vector<int>(chrom.mask.begin(), chrom.mask.end());
  j["act"] = chrom.act_bits;
  return j;
}

Chromosome chromosome_from_json(const nlohmann::json& j) {
  Chromosome c;
  const auto coeffs = j.at("coeffs").get<std::vector<double>>();
  c.coeffs = Eigen::Map<const Vector>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  for (int bit : j.at("mask").get<std::vector<int>>()) {
    if (bit != 0 && bit != 1) throw DataError("chromosome mask entries must be 0 or 1");
    c.mask.push_back(static_cast<std::uint8_t>(bit));
  }
  c.act_bits = j.at("act").get<int>();
  if (c.act_bits < 0 || c.act_bits > 3) throw DataError("chromosome act gene out of range");
  return c;
}

}  // namespace evonet
