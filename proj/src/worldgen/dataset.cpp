#include "relexp/worldgen/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "relexp/common/error.hpp"
#include "relexp/common/png_io.hpp"
#include "relexp/common/rng.hpp"
#include "relexp/worldgen/generator.hpp"

namespace relexp::worldgen {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 3> kSplitNames = {"train", "val", "test"};

std::vector<LabeledImage> build_split(ConceptId concept_id, int size, std::uint64_t seed,
                                      std::uint64_t split) {
  std::vector<bool> labels(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) labels[static_cast<std::size_t>(i)] = i < size / 2;
  Rng order_rng(derive_seed(seed, {split, 0xffffffffull}));
  for (int i = size - 1; i > 0; --i) {
    const int j = uniform_index(order_rng, i + 1);
    const bool tmp = labels[static_cast<std::size_t>(i)];
    labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(j)];
    labels[static_cast<std::size_t>(j)] = tmp;
  }
  std::vector<LabeledImage> items;
  items.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    const bool label = labels[static_cast<std::size_t>(i)];
    Scene scene = generate(concept_id, derive_seed(seed, {split, static_cast<std::uint64_t>(i)}), label);
    items.push_back({render(scene), label, std::move(scene)});
  }
  return items;
}

std::string item_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu.png", i);
  return buf;
}

void write_split(const std::vector<LabeledImage>& items, const fs::path& dir) {
  fs::create_directories(dir);
  std::ostringstream index;
  index << "filename,label\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto name = item_name(i);
    write_png(dir / name, to_raster(items[i].image));
    index << name << "," << (items[i].label ? 1 : 0) << "\n";
  }
  write_text_file(dir / "index.csv", index.str());
}

std::vector<LabeledImage> read_split(const fs::path& dir) {
  if (!fs::exists(dir / "index.csv")) throw IoError("missing " + (dir / "index.csv").string());
  std::istringstream in(read_text_file(dir / "index.csv"));
  std::string line;
  std::getline(in, line);
  if (line != "filename,label") throw IoError("unexpected header in " + (dir / "index.csv").string());
  std::vector<LabeledImage> items;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("malformed index line: " + line);
    LabeledImage item;
    item.image = from_raster(read_png(dir / line.substr(0, comma)));
    item.label = line.substr(comma + 1) == "1";
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

DatasetSplit build_dataset(ConceptId concept_id, DatasetSizes sizes, std::uint64_t seed) {
  for (int s : {sizes.train, sizes.val, sizes.test}) {
    if (s <= 0 || s % 2 != 0) {
      throw ConfigError("split sizes must be positive and even for exact class balance, got " +
                        std::to_string(s));
    }
  }
  DatasetSplit data;
  data.seed = seed;
  data.concept_id = concept_id;
  data.sizes = sizes;
  data.train = build_split(concept_id, sizes.train, seed, 0);
  data.val = build_split(concept_id, sizes.val, seed, 1);
  data.test = build_split(concept_id, sizes.test, seed, 2);
  return data;
}

void write_dataset(const DatasetSplit& data, const fs::path& dir) {
  fs::create_directories(dir);
  write_split(data.train, dir / kSplitNames[0]);
  write_split(data.val, dir / kSplitNames[1]);
  write_split(data.test, dir / kSplitNames[2]);
  nlohmann::ordered_json manifest;
  manifest["concept"] = std::string(concept_name(data.concept_id));
  manifest["seed"] = data.seed;
  manifest["sizes"] = {{"train", data.sizes.train}, {"val", data.sizes.val}, {"test", data.sizes.test}};
  manifest["image"] = {{"width", kImageSize}, {"height", kImageSize}, {"grid", kGridSize}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

DatasetSplit read_dataset(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json")) throw IoError("missing " + (dir / "manifest.json").string());
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  DatasetSplit data;
  const auto concept_id = parse_concept(manifest.at("concept").get<std::string>());
  if (!concept_id) throw IoError("unknown concept in manifest");
  data.concept_id = *concept_id;
  data.seed = manifest.at("seed").get<std::uint64_t>();
  data.sizes.train = manifest.at("sizes").at("train").get<int>();
  data.sizes.val = manifest.at("sizes").at("val").get<int>();
  data.sizes.test = manifest.at("sizes").at("test").get<int>();
  data.train = read_split(dir / kSplitNames[0]);
  data.val = read_split(dir / kSplitNames[1]);
  data.test = read_split(dir / kSplitNames[2]);
  return data;
}

}  // namespace relexp::worldgen
