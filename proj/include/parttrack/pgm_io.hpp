#pragma once

#include <string>

#include "parttrack/image.hpp"

namespace parttrack {

// Depth rasters: binary PGM (P5), maxval 65535, samples big-endian millimeters,
// 0 = invalid. Label rasters: binary PGM (P5), maxval 255, values 0-4.

void write_depth_pgm(const std::string& path, const DepthImage& img);
DepthImage read_depth_pgm(const std::string& path);

void write_label_pgm(const std::string& path, const LabelImage& img);
LabelImage read_label_pgm(const std::string& path);

}  // namespace parttrack
