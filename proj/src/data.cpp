#include "evonet/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "evonet/errors.hpp"

namespace evonet {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& what) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4))
    throw DataError("idx: truncated file while reading " + what);
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) | (std::uint32_t(buf[2]) << 8) |
         std::uint32_t(buf[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

int max_label(const std::vector<int>& y) {
  int m = 0;
  for (int v : y) m = std::max(m, v);
  return m;
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw DataError("idx: cannot open image file " + images_path.string());
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw DataError("idx: cannot open label file " + labels_path.string());

  const auto img_magic = read_be32(img, "image magic");
  if (img_magic != kImageMagic)
    throw DataError("idx: bad image magic in " + images_path.string() + " (expected 0x803)");
  const auto lab_magic = read_be32(lab, "label magic");
  if (lab_magic != kLabelMagic)
    throw DataError("idx: bad label magic in " + labels_path.string() + " (expected 0x801)");

  const auto n_images = read_be32(img, "image count");
  const auto height = read_be32(img, "image height");
  const auto width = read_be32(img, "image width");
  const auto n_labels = read_be32(lab, "label count");
  if (n_images != n_labels)
    throw DataError("idx: image count " + std::to_string(n_images) + " does not match label count " +
                    std::to_string(n_labels));
  if (n_images == 0) throw DataError("idx: empty dataset");

  const std::size_t d = static_cast<std::size_t>(height) * width;
  std::vector<unsigned char> row(d);
  Dataset ds;
  ds.X.resize(n_images, static_cast<Eigen::Index>(d));
  ds.y.resize(n_images);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    if (!img.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(d)))
      throw DataError("idx: truncated pixel data at image " + std::to_string(i));
    for (std::size_t j = 0; j < d; ++j) ds.X(i, static_cast<Eigen::Index>(j)) = row[j] / 255.0;
    char label;
    if (!lab.get(label)) throw DataError("idx: truncated label data at index " + std::to_string(i));
    ds.y[i] = static_cast<unsigned char>(label);
  }
  ds.num_classes = max_label(ds.y) + 1;
  ds.name = images_path.stem().string();
  return ds;
}

void write_idx(const Dataset& ds, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  std::ofstream img(images_path, std::ios::binary);
  if (!img) throw DataError("idx: cannot write image file " + images_path.string());
  std::ofstream lab(labels_path, std::ios::binary);
  if (!lab) throw DataError("idx: cannot write label file " + labels_path.string());

  const auto n = static_cast<std::uint32_t>(ds.size());
  const auto d = static_cast<std::uint32_t>(ds.dim());
  // Flat vectors are stored as n x d x 1 (height = d, width = 1 keeps the
  // row-major flattening trivially invertible).
  std::uint32_t height = d, width = 1;
  const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(d))));
  if (side * side == d) {
    height = side;
    width = side;
  }
  write_be32(img, kImageMagic);
  write_be32(img, n);
  write_be32(img, height);
  write_be32(img, width);
  write_be32(lab, kLabelMagic);
  write_be32(lab, n);
  std::vector<unsigned char> row(d);
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j)
      row[static_cast<std::size_t>(j)] =
          static_cast<unsigned char>(std::lround(std::clamp(ds.X(i, j), 0.0, 1.0) * 255.0));
    img.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(d));
    lab.put(static_cast<char>(static_cast<unsigned char>(ds.y[static_cast<std::size_t>(i)])));
  }
}

Dataset gen_rectangles(int n_samples, int side, RngStream& rng) {
  if (side < 8) throw NumericError("gen_rectangles: side must be >= 8");
  Dataset ds;
  ds.X = Matrix::Zero(n_samples, static_cast<Eigen::Index>(side) * side);
  ds.y.resize(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    int h = 0, w = 0;
    do {
      h = static_cast<int>(rng.uniform_int(3, side));
      w = static_cast<int>(rng.uniform_int(3, side));
    } while (h == w);
    const int top = static_cast<int>(rng.uniform_int(0, side - h));
    const int left = static_cast<int>(rng.uniform_int(0, side - w));
    auto px = [&](int r, int c) -> double& { return ds.X(i, static_cast<Eigen::Index>(r) * side + c); };
    for (int c = left; c < left + w; ++c) {
      px(top, c) = 1.0;
      px(top + h - 1, c) = 1.0;
    }
    for (int r = top; r < top + h; ++r) {
      px(r, left) = 1.0;
      px(r, left + w - 1) = 1.0;
    }
    ds.y[static_cast<std::size_t>(i)] = h > w ? 1 : 0;
  }
  ds.num_classes = 2;
  ds.name = "rectangles";
  return ds;
}

Dataset gen_blobs(int n_samples, int dim, int n_classes, double separation, RngStream& rng,
                  Matrix* centers_out) {
  if (separation <= 0.0) throw NumericError("gen_blobs: separation must be positive");
  if (n_samples < 1 || dim < 1 || n_classes < 1) throw NumericError("gen_blobs: invalid sizes");

  // Rejection-sample centers inside a box that grows until placement fits.
  Matrix centers(n_classes, dim);
  double box = separation * std::max(2.0, static_cast<double>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    for (int attempt = 0;; ++attempt) {
      for (int j = 0; j < dim; ++j) centers(c, j) = rng.uniform(0.0, box);
      bool ok = true;
      for (int p = 0; p < c && ok; ++p)
        ok = (centers.row(c) - centers.row(p)).norm() >= separation;
      if (ok) break;
      if (attempt > 200) box *= 1.5;
    }
  }

  Dataset ds;
  ds.X.resize(n_samples, dim);
  ds.y.resize(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const int c = i % n_classes;
    for (int j = 0; j < dim; ++j) ds.X(i, j) = centers(c, j) + rng.normal();
    ds.y[static_cast<std::size_t>(i)] = c;
  }

  // Per-feature min-max rescale to [0, 1]; the same affine map is applied to
  // the centers reported to the caller.
  for (int j = 0; j < dim; ++j) {
    const double lo = ds.X.col(j).minCoeff();
    const double hi = ds.X.col(j).maxCoeff();
    const double range = hi - lo;
    if (range < 1e-12) {
      ds.X.col(j).setConstant(0.5);
      centers.col(j).setConstant(0.5);
    } else {
      ds.X.col(j) = (ds.X.col(j).array() - lo) / range;
      centers.col(j) = (centers.col(j).array() - lo) / range;
    }
  }
  ds.num_classes = n_classes;
  ds.name = "blobs";
  if (centers_out) *centers_out = centers;
  return ds;
}

std::vector<Dataset> split(const Dataset& ds, const std::vector<double>& fractions, RngStream& rng,
                           bool return_remainder) {
  double total = 0.0;
  for (double f : fractions) {
    if (f <= 0.0) throw NumericError("split: fractions must be positive");
    total += f;
  }
  if (total > 1.0 + 1e-12) throw NumericError("split: fractions sum to more than 1");

  const Eigen::Index n = ds.size();
  std::vector<Eigen::Index> counts;
  Eigen::Index used = 0;
  for (double f : fractions) {
    const auto c = static_cast<Eigen::Index>(std::floor(f * static_cast<double>(n) + 1e-9));
    if (c < 1) throw NumericError("split: a fraction selects fewer than one row");
    counts.push_back(c);
    used += c;
  }
  if (used > n) throw NumericError("split: fractions select more rows than available");

  auto order = rng.sample_without_replacement(n, n);
  std::vector<Dataset> parts;
  Eigen::Index cursor = 0;
  auto slice = [&](Eigen::Index count) {
    Dataset part;
    part.X.resize(count, ds.dim());
    part.y.resize(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
      const auto src = order[static_cast<std::size_t>(cursor + i)];
      part.X.row(i) = ds.X.row(src);
      part.y[static_cast<std::size_t>(i)] = ds.y[static_cast<std::size_t>(src)];
    }
    part.num_classes = ds.num_classes;
    part.name = ds.name;
    cursor += count;
    return part;
  };
  for (auto c : counts) parts.push_back(slice(c));
  if (return_remainder && cursor < n) parts.push_back(slice(n - cursor));
  return parts;
}

Dataset take(const Dataset& ds, Eigen::Index count) {
  if (count <= 0 || count >= ds.size()) return ds;
  Dataset out;
  out.X = ds.X.topRows(count);
  out.y.assign(ds.y.begin(), ds.y.begin() + count);
  out.num_classes = ds.num_classes;
  out.name = ds.name;
  return out;
}

}  // namespace evonet
