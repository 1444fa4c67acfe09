#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "relexp/common/image.hpp"

namespace relexp {

// 8-bit RGB PNG, fixed compression settings and no time chunk so equal
// rasters always encode to equal bytes.
std::vector<std::uint8_t> encode_png(const Raster& raster);
Raster decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::filesystem::path& path, const Raster& raster);
Raster read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace relexp
