#pragma once

#include "relexp/common/image.hpp"
#include "relexp/explain/annotation.hpp"

namespace relexp::explain {

inline constexpr int kMinScale = 4;

// Height of the caption band for a given output width; 0 for no caption.
int caption_height(const std::string& caption, int width, int scale);

// Nearest-neighbor upscale with cell outlines, center-to-center edges and a
// caption band below. Throws ConfigError for scale < 4.
Raster render_annotated(const Image& image, const Annotation& annotation, int scale = 10);

}  // namespace relexp::explain
