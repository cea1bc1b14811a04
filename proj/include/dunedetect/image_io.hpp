#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dunedetect {

void write_png_rgb8(const std::filesystem::path& file, int width, int height,
                    const uint8_t* rgb);

/// Reads any 8/16-bit gray/palette/RGB(A) PNG and returns 8-bit RGB.
void read_png_rgb8(const std::filesystem::path& file, int& width, int& height,
                   std::vector<uint8_t>& rgb);

}  // namespace dunedetect
