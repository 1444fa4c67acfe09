#include "relexp/tinynn/model_io.hpp"

#include <bit>
#include <cstring>
#include <json.hpp>

#include "relexp/common/error.hpp"
#include "relexp/common/png_io.hpp"

namespace relexp::tinynn {

namespace {

constexpr char kMagic[8] = {'R', 'E', 'L', 'E', 'X', 'P', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

nlohmann::ordered_json arch_json(const Architecture& a) {
  return {{"input", {a.height, a.width, a.channels}},
          {"kernel", a.kernel},
          {"conv1_filters", a.conv1_filters},
          {"conv2_filters", a.conv2_filters},
          {"dense1", a.dense1},
          {"dense2", a.dense2},
          {"classes", a.classes},
          {"pooling", false},
          {"activation", "relu"},
          {"output", "softmax"}};
}

Architecture arch_from_json(const nlohmann::json& j) {
  Architecture a;
  a.height = j.at("input").at(0).get<int>();
  a.width = j.at("input").at(1).get<int>();
  a.channels = j.at("input").at(2).get<int>();
  a.kernel = j.at("kernel").get<int>();
  a.conv1_filters = j.at("conv1_filters").get<int>();
  a.conv2_filters = j.at("conv2_filters").get<int>();
  a.dense1 = j.at("dense1").get<int>();
  a.dense2 = j.at("dense2").get<int>();
  a.classes = j.at("classes").get<int>();
  return a;
}

}  // namespace

std::vector<std::uint8_t> encode_params(const NetworkParams<float>& params) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(params.parameter_count()));
  visit_tensors(params, [&](std::string_view, const float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) put_u32(out, std::bit_cast<std::uint32_t>(data[i]));
  });
  return out;
}

NetworkParams<float> decode_params(const std::vector<std::uint8_t>& bytes, const Architecture& arch) {
  auto params = NetworkParams<float>::zeros(arch);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw IoError("model file has no RELEXPNN header");
  }
  if (get_u32(bytes.data() + 8) != kVersion) throw IoError("unsupported model file version");
  const std::size_t count = get_u32(bytes.data() + 12);
  if (count != params.parameter_count() || bytes.size() != 16 + 4 * count) {
    throw IoError("model file does not match the architecture");
  }
  const std::uint8_t* p = bytes.data() + 16;
  visit_tensors(params, [&](std::string_view, float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i, p += 4) data[i] = std::bit_cast<float>(get_u32(p));
  });
  return params;
}

void save_model(const std::filesystem::path& dir, const Classifier& classifier,
                const ModelMetadata& meta) {
  std::filesystem::create_directories(dir);
  write_file_bytes(dir / "model.bin", encode_params(classifier.params()));
  const auto& c = meta.config;
  nlohmann::ordered_json j;
  j["format"] = {{"magic", "RELEXPNN"}, {"version", kVersion}, {"dtype", "float32-le"}};
  j["architecture"] = arch_json(classifier.architecture());
  j["parameter_count"] = classifier.params().parameter_count();
  j["train_config"] = {{"max_epochs", c.max_epochs},     {"patience", c.patience},
                       {"batch_size", c.batch_size},     {"learning_rate", c.learning_rate},
                       {"optimizer", "adam"},            {"beta1", c.beta1},
                       {"beta2", c.beta2},               {"epsilon", c.epsilon},
                       {"conv_dropout", c.dropout.conv}, {"dense_dropout", c.dropout.dense},
                       {"seed", c.seed}};
  j["best_epoch"] = meta.best_epoch;
  j["epochs_run"] = meta.history.size();
  write_text_file(dir / "model.json", j.dump(2) + "\n");
}

Classifier load_model(const std::filesystem::path& dir, ModelMetadata* meta) {
  if (!std::filesystem::exists(dir / "model.bin")) throw IoError("missing " + (dir / "model.bin").string());
  Architecture arch;
  if (std::filesystem::exists(dir / "model.json")) {
    const auto j = nlohmann::json::parse(read_text_file(dir / "model.json"));
    arch = arch_from_json(j.at("architecture"));
    if (meta) {
      meta->arch = arch;
      const auto& c = j.at("train_config");
      meta->config.max_epochs = c.at("max_epochs").get<int>();
      meta->config.patience = c.at("patience").get<int>();
      meta->config.batch_size = c.at("batch_size").get<int>();
      meta->config.learning_rate = c.at("learning_rate").get<double>();
      meta->config.dropout.conv = c.at("conv_dropout").get<double>();
      meta->config.dropout.dense = c.at("dense_dropout").get<double>();
      meta->config.seed = c.at("seed").get<std::uint64_t>();
      meta->best_epoch = j.at("best_epoch").get<int>();
    }
  }
  return Classifier(decode_params(read_file_bytes(dir / "model.bin"), arch));
}

}  // namespace relexp::tinynn
