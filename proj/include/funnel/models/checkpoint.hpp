#pragma once

#include <filesystem>
#include <json.hpp>

#include "funnel/data/tabular.hpp"
#include "funnel/models/builder.hpp"

namespace funnel::models {

/// Everything needed to rebuild a trained model: the build record, every
/// parameter value, and the data standardization used during training.
struct Checkpoint {
  nlohmann::json config;  // {model, input_dim, seed, dropout, ...}
  std::vector<std::pair<std::string, Tensor>> params;
  data::Standardization standardization;
  /// Free-form record carried alongside (dataset name, bits, step, ...).
  nlohmann::json info = nlohmann::json::object();
};

Checkpoint make_checkpoint(const BuiltModel& model, const data::Standardization& standardization = {},
                           nlohmann::json info = nlohmann::json::object());

/// Binary container: magic "FNLCKPT1", u32 version, length-prefixed JSON
/// config and info, then parameters as (name, rank, dims, little-endian f64).
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Rebuilds the model from the config and assigns every stored parameter.
BuiltModel load_model(const Checkpoint& checkpoint);

}  // namespace funnel::models
