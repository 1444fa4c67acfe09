#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "relexp/worldgen/scene.hpp"

namespace relexp::worldgen {

struct DatasetSizes {
  int train = 2000;
  int val = 500;
  int test = 500;
  bool operator==(const DatasetSizes&) const = default;
};

inline constexpr DatasetSizes kFullScaleSizes{7000, 2000, 1000};
inline constexpr DatasetSizes kDeskSizes{2000, 500, 500};

struct LabeledImage {
  Image image;
  bool label = false;
  Scene scene;  // empty when loaded from disk
};

struct DatasetSplit {
  std::vector<LabeledImage> train;
  std::vector<LabeledImage> val;
  std::vector<LabeledImage> test;
  std::uint64_t seed = 0;
  ConceptId concept_id = ConceptId::single_relation;
  DatasetSizes sizes;
};

// Exactly half of every split is positive; sizes must be positive and even.
// Items are drawn independently per (split, index) stream of the seed.
DatasetSplit build_dataset(ConceptId concept_id, DatasetSizes sizes, std::uint64_t seed);

// Layout: <dir>/manifest.json and <dir>/{train,val,test}/{index.csv,NNNNN.png}.
void write_dataset(const DatasetSplit& data, const std::filesystem::path& dir);
DatasetSplit read_dataset(const std::filesystem::path& dir);

}  // namespace relexp::worldgen
