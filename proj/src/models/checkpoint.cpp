#include "funnel/models/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace funnel::models {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'F', 'N', 'L', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_doubles(std::ostream& out, std::span<const double> v) {
  put<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T get() {
    T v{};
    read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    if (n > (1ull << 32)) throw std::runtime_error("checkpoint: corrupt string length");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  std::vector<double> get_doubles() {
    const auto n = get<std::uint64_t>();
    if (n > (1ull << 34)) throw std::runtime_error("checkpoint: corrupt array length");
    std::vector<double> v(n);
    read(reinterpret_cast<char*>(v.data()), n * sizeof(double));
    return v;
  }

 private:
  void read(char* dst, std::size_t n) {
    if (n > 0 && !in_.read(dst, static_cast<std::streamsize>(n))) throw std::runtime_error("checkpoint: truncated file");
  }
  std::istream& in_;
};

}  // namespace

Checkpoint make_checkpoint(const BuiltModel& model, const data::Standardization& standardization,
                           nlohmann::json info) {
  Checkpoint c;
  c.config = {{"model", model.spec.to_json()},
              {"input_dim", model.input_dim},
              {"seed", model.seed},
              {"dropout", model.dropout}};
  for (const auto& p : model.store->entries()) c.params.emplace_back(p.name, p.var.value());
  c.standardization = standardization;
  c.info = std::move(info);
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put_string(out, checkpoint.config.dump());
  put_string(out, checkpoint.info.dump());
  put<std::uint64_t>(out, checkpoint.params.size());
  for (const auto& [name, value] : checkpoint.params) {
    put_string(out, name);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(value.rank()));
    for (std::size_t d : value.shape()) put<std::uint64_t>(out, d);
    put_doubles(out, value.values());
  }
  put_doubles(out, checkpoint.standardization.mean);
  put_doubles(out, checkpoint.standardization.scale);
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  Reader r(in);
  char magic[8];
  for (char& ch : magic) ch = r.get<char>();
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("checkpoint: bad magic in " + path.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint c;
  c.config = nlohmann::json::parse(r.get_string());
  c.info = nlohmann::json::parse(r.get_string());
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.get_string();
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) throw std::runtime_error("checkpoint: corrupt rank for " + name);
    diff::Shape shape(rank);
    for (auto& d : shape) d = r.get<std::uint64_t>();
    std::vector<double> values = r.get_doubles();
    if (values.size() != diff::shape_size(shape)) throw std::runtime_error("checkpoint: size mismatch for " + name);
    c.params.emplace_back(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  c.standardization.mean = r.get_doubles();
  c.standardization.scale = r.get_doubles();
  if (c.standardization.mean.size() != c.standardization.scale.size()) {
    throw std::runtime_error("checkpoint: corrupt standardization record");
  }
  return c;
}

BuiltModel load_model(const Checkpoint& checkpoint) {
  const auto& cfg = checkpoint.config;
  BuiltModel built = build_model(ModelSpec::from_json(cfg.at("model")), cfg.at("input_dim").get<std::size_t>(),
                                 cfg.at("seed").get<std::uint64_t>(), cfg.at("dropout").get<double>());
  if (built.store->size() != checkpoint.params.size()) {
    throw std::runtime_error("checkpoint: parameter count " + std::to_string(checkpoint.params.size()) +
                             " does not match the model's " + std::to_string(built.store->size()));
  }
  for (const auto& [name, value] : checkpoint.params) built.store->assign(name, value);
  return built;
}

}  // namespace funnel::models
