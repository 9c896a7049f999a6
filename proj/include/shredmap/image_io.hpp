#pragma once

#include <filesystem>

#include "shredmap/image.hpp"

namespace shredmap {

// Decodes PNG or JPEG (chosen by file signature) into 8-bit RGB.
// Alpha is composited onto white. Throws InputError naming the path.
RasterImage read_image(const std::filesystem::path& path);

// Writes 8-bit RGB PNG. Throws InputError on failure.
void write_png(const std::filesystem::path& path, const RasterImage& img);

bool is_image_file(const std::filesystem::path& path);

}  // namespace shredmap
