#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "evonet/rng.hpp"
#include "evonet/subspace.hpp"

namespace evonet {

// Row-per-sample dataset with pixel/feature values in [0, 1] and integer
// labels in [0, num_classes).
struct Dataset {
  Matrix X;
  std::vector<int> y;
  int num_classes = 0;
  std::string name;

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
};

// Parses big-endian IDX image/label files (magics 0x00000803 and 0x00000801).
// Pixels are scaled by 1/255; H x W images flatten row-major to d = H*W.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

// Writes a dataset back to IDX bytes (values rounded to 0..255). Loading a
// dataset produced by load_idx and writing it again is byte identical.
void write_idx(const Dataset& ds, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

// White rectangle outlines (side lengths >= 3, height != width) on a black
// background; label 0 when wider than tall, 1 when taller than wide.
Dataset gen_rectangles(int n_samples, int side, RngStream& rng);

// Gaussian clusters with unit variance around mutually distant centers
// (pairwise distance >= separation), min-max rescaled per feature to [0, 1].
// When centers_out is given it receives the rescaled centers, one row per
// class.
Dataset gen_blobs(int n_samples, int dim, int n_classes, double separation, RngStream& rng,
                  Matrix* centers_out = nullptr);

// Disjoint uniform-without-replacement partitions with the given fractions
// (summing to at most 1). With return_remainder the rows not covered by the
// fractions are appended as a final part.
std::vector<Dataset> split(const Dataset& ds, const std::vector<double>& fractions, RngStream& rng,
                           bool return_remainder = false);

// First `count` rows (the whole dataset when count <= 0 or count >= size).
Dataset take(const Dataset& ds, Eigen::Index count);

}  // namespace evonet
