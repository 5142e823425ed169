#include "funnel/data/dataset.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace funnel::data {

using nlohmann::json;

QuantizedImageSet load_idx_subset(const std::filesystem::path& path, int bits, std::size_t limit) {
  QuantizedImageSet images = load_idx_images(path);
  if (limit > 0 && limit < images.count) images = images.subset(0, limit);
  return reduce_bits(images, bits);
}

Tensor redequantize(const Tensor& x, int bits, Rng& rng) {
  const double levels = std::ldexp(1.0, bits);
  Tensor out = x;
  for (double& v : out.values()) v = (std::floor(v * levels) + rng.uniform()) / levels;
  return out;
}

LoadedDataset load_dataset(const json& spec, const std::filesystem::path& base_dir, std::uint64_t seed) {
  static const std::set<std::string> keys = {"kind",  "name",         "n",     "mean",         "cholesky",
                                             "path",  "standardize",  "limit", "bits",         "val_fraction",
                                             "test_fraction"};
  if (!spec.is_object()) throw std::invalid_argument("dataset spec must be a JSON object");
  for (const auto& [key, value] : spec.items()) {
    if (!keys.contains(key)) throw std::invalid_argument("dataset spec: unknown key '" + key + "'");
  }
  const std::string kind = spec.at("kind").get<std::string>();
  SplitFractions fractions;
  fractions.val = spec.value("val_fraction", fractions.val);
  fractions.test = spec.value("test_fraction", fractions.test);
  const Rng root(seed);
  const std::uint64_t gen_seed = root.fork(1).seed(), split_seed = root.fork(2).seed();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? base_dir / path : path;
  };

  LoadedDataset out;
  out.name = spec.value("name", kind);
  if (kind == "four_circles") {
    out.split = split_rows(four_circles(spec.at("n").get<std::size_t>(), gen_seed), false, split_seed, fractions);
  } else if (kind == "gaussian") {
    const auto mean = spec.at("mean").get<std::vector<double>>();
    const auto chol = spec.at("cholesky").get<std::vector<double>>();
    out.split = split_rows(gaussian_samples(spec.at("n").get<std::size_t>(), mean, chol, gen_seed), false, split_seed,
                           fractions);
  } else if (kind == "csv") {
    Tensor rows = read_csv(resolve(spec.at("path").get<std::string>()));
    const auto limit = spec.value("limit", std::size_t{0});
    if (limit > 0 && limit < rows.dim(0)) rows = rows.row_range(0, limit);
    out.split = split_rows(rows, spec.value("standardize", true), split_seed, fractions);
  } else if (kind == "idx") {
    out.bits = spec.value("bits", 8);
    const QuantizedImageSet images =
        load_idx_subset(resolve(spec.at("path").get<std::string>()), out.bits, spec.value("limit", std::size_t{0}));
    out.image_shape = {images.height, images.width, images.channels};
    out.split = split_rows(dequantize(images, gen_seed), false, split_seed, fractions);
  } else {
    throw std::invalid_argument("dataset spec: unknown kind '" + kind + "'");
  }
  return out;
}

}  // namespace funnel::data
