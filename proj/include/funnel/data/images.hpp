#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "funnel/diff/tensor.hpp"

namespace funnel::data {

/// Integer images in {0, ..., 2^bits - 1}, each stored as H * W * C values in
/// row-major (h, w, c) order.
struct QuantizedImageSet {
  std::size_t count = 0, height = 0, width = 0, channels = 1;
  int bits = 8;
  std::vector<std::uint16_t> values;

  std::size_t pixels_per_image() const noexcept { return height * width * channels; }
  std::uint16_t at(std::size_t image, std::size_t h, std::size_t w, std::size_t c = 0) const {
    return values[((image * height + h) * width + w) * channels + c];
  }
  /// Images [begin, end).
  QuantizedImageSet subset(std::size_t begin, std::size_t end) const;
  void validate() const;
};

/// IDX image file (magic 0x00000803, big-endian count, rows, cols, then
/// unsigned bytes). Throws std::runtime_error on a bad header or truncation.
QuantizedImageSet load_idx_images(const std::filesystem::path& path);
void write_idx_images(const std::filesystem::path& path, const QuantizedImageSet& images);

/// v' = floor(v / 2^(from - to)).
QuantizedImageSet reduce_bits(const QuantizedImageSet& images, int to_bits);

/// x = (v + u) / 2^bits with u ~ U[0, 1) per value; [count, H * W * C].
diff::Tensor dequantize(const QuantizedImageSet& images, std::uint64_t seed);

}  // namespace funnel::data
