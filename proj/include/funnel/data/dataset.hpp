#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>

#include "funnel/data/images.hpp"
#include "funnel/data/tabular.hpp"

namespace funnel::data {

/// A dataset resolved from its JSON spec. `bits` > 0 marks dequantized image
/// data in [0, 1); training then redraws the dequantization noise per batch.
struct LoadedDataset {
  std::string name;
  DatasetSplit split;
  int bits = 0;
  std::vector<std::size_t> image_shape;  // [H, W, C] for images
};

/// Kinds:
///   {"kind": "four_circles", "n": N}
///   {"kind": "gaussian", "n": N, "mean": [...], "cholesky": [...]}
///   {"kind": "csv", "path": P, "standardize": true, "limit": 0}
///   {"kind": "idx", "path": P, "bits": 5, "limit": 0}
/// Optional "val_fraction" / "test_fraction" (default 0.1 each) and "name".
/// Relative paths resolve against `base_dir`.
LoadedDataset load_dataset(const nlohmann::json& spec, const std::filesystem::path& base_dir, std::uint64_t seed);

/// Reads IDX images, reduces them to `bits`, keeps the first `limit` (0 = all).
QuantizedImageSet load_idx_subset(const std::filesystem::path& path, int bits, std::size_t limit = 0);

/// Replaces the uniform noise of dequantized rows: x' = (floor(x 2^b) + u) / 2^b.
Tensor redequantize(const Tensor& x, int bits, Rng& rng);

}  // namespace funnel::data
