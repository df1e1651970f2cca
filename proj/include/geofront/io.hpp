#pragma once

// Image, label-map and field files.

#include <cstdint>
#include <string>
#include <vector>

#include "geofront/grid.hpp"

namespace geofront {

/// 8-bit raster as stored on disk.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 or 3
  std::vector<std::uint8_t> data;
};

/// PNG (via libpng), binary PGM (P5) and PPM (P6). Alpha is dropped and
/// gray+alpha / palette images are expanded.
RawImage read_raw_image(const std::string& path);
/// Format from the extension: .png, .pgm or .ppm.
void write_raw_image(const std::string& path, const RawImage& image);

/// Intensities mapped to [0, 1] by /255.
ImageGrid read_image(const std::string& path);
RawImage to_raw(const ImageGrid& image);

/// Nonzero pixels (any channel) are set.
Mask read_mask(const std::string& path);
void write_mask(const std::string& path, const Mask& mask);

/// Region k is stored as gray level (k - 1) * floor(255 / (n - 1)).
void write_label_map(const std::string& path, const LabelMap& labels);
/// Distinct pixel values, sorted, become regions 1..n.
LabelMap read_label_map(const std::string& path);

/// Input image with the contour pixels painted red.
RawImage contour_overlay(const ImageGrid& image, const LabelMap& labels);

/// "FGRID v1 <width> <height>\n" followed by row-major little-endian
/// 64-bit floats; +inf is stored as IEEE infinity.
void write_fgrid(const std::string& path, const ScalarField& field);
ScalarField read_fgrid(const std::string& path);

void write_text(const std::string& path, const std::string& text);

}  // namespace geofront
