#pragma once

#include <filesystem>
#include <vector>

#include "relexp/tinynn/training.hpp"

namespace relexp::tinynn {

// model.bin: 16-byte header ("RELEXPNN", u32 LE version, u32 LE parameter
// count) followed by little-endian float32 tensors in NetworkParams order.
std::vector<std::uint8_t> encode_params(const NetworkParams<float>& params);
NetworkParams<float> decode_params(const std::vector<std::uint8_t>& bytes, const Architecture& arch);

struct ModelMetadata {
  Architecture arch;
  TrainConfig config;
  int best_epoch = 0;
  std::vector<EpochMetrics> history;
};

// Writes <dir>/model.bin and <dir>/model.json.
void save_model(const std::filesystem::path& dir, const Classifier& classifier,
                const ModelMetadata& meta);
Classifier load_model(const std::filesystem::path& dir, ModelMetadata* meta = nullptr);

}  // namespace relexp::tinynn
