#include "funnel/data/images.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

#include "funnel/diff/rng.hpp"

namespace funnel::data {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;

std::uint32_t read_be32(std::istream& in, const std::string& what) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw std::runtime_error("idx: truncated header (" + what + ")");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                              static_cast<char>(v)};
  out.write(b.data(), 4);
}

}  // namespace

QuantizedImageSet QuantizedImageSet::subset(std::size_t begin, std::size_t end) const {
  if (begin > end || end > count) throw std::out_of_range("images: subset out of range");
  QuantizedImageSet s = *this;
  s.count = end - begin;
  const std::size_t p = pixels_per_image();
  s.values.assign(values.begin() + static_cast<std::ptrdiff_t>(begin * p),
                  values.begin() + static_cast<std::ptrdiff_t>(end * p));
  return s;
}

void QuantizedImageSet::validate() const {
  if (bits < 1 || bits > 16) throw std::invalid_argument("images: bits must be in [1, 16]");
  if (values.size() != count * pixels_per_image()) throw std::invalid_argument("images: value count mismatch");
  const std::uint32_t limit = 1u << bits;
  for (std::uint16_t v : values) {
    if (v >= limit) throw std::invalid_argument("images: value " + std::to_string(v) + " exceeds the bit range");
  }
}

QuantizedImageSet load_idx_images(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("idx: cannot open " + path.string());
  const std::uint32_t magic = read_be32(in, "magic");
  if (magic != kImageMagic) throw std::runtime_error("idx: bad magic number in " + path.string());
  QuantizedImageSet set;
  set.count = read_be32(in, "count");
  set.height = read_be32(in, "rows");
  set.width = read_be32(in, "cols");
  set.channels = 1;
  set.bits = 8;
  const std::size_t total = set.count * set.height * set.width;
  std::vector<unsigned char> bytes(total);
  if (total > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(total))) {
    throw std::runtime_error("idx: truncated pixel data in " + path.string());
  }
  set.values.assign(bytes.begin(), bytes.end());
  return set;
}

void write_idx_images(const std::filesystem::path& path, const QuantizedImageSet& images) {
  images.validate();
  if (images.channels != 1 || images.bits > 8) throw std::invalid_argument("idx: only single-channel 8-bit images");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("idx: cannot write " + path.string());
  write_be32(out, kImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.count));
  write_be32(out, static_cast<std::uint32_t>(images.height));
  write_be32(out, static_cast<std::uint32_t>(images.width));
  std::vector<char> bytes(images.values.begin(), images.values.end());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

QuantizedImageSet reduce_bits(const QuantizedImageSet& images, int to_bits) {
  if (to_bits > images.bits) throw std::invalid_argument("reduce_bits: cannot increase the bit depth");
  if (to_bits < 1) throw std::invalid_argument("reduce_bits: target bit depth must be positive");
  QuantizedImageSet out = images;
  out.bits = to_bits;
  const int shift = images.bits - to_bits;
  for (std::uint16_t& v : out.values) v = static_cast<std::uint16_t>(v >> shift);
  return out;
}

diff::Tensor dequantize(const QuantizedImageSet& images, std::uint64_t seed) {
  images.validate();
  diff::Rng rng(seed);
  const double levels = static_cast<double>(1u << images.bits);
  diff::Tensor x(diff::Shape{images.count, images.pixels_per_image()});
  for (std::size_t i = 0; i < images.values.size(); ++i) x[i] = (images.values[i] + rng.uniform()) / levels;
  return x;
}

}  // namespace funnel::data
