#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "dunedetect/rng.hpp"
#include "dunedetect/types.hpp"

namespace dunedetect::testing {

/// unique temp directory, removed on destruction
struct TmpDir {
    std::filesystem::path path;

    explicit TmpDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("dunedetect-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TmpDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

inline LabeledImage solid_image(const std::string& id, int w, int h, uint8_t r, uint8_t g,
                                uint8_t b) {
    LabeledImage img;
    img.id = id;
    img.width_px = w;
    img.height_px = h;
    img.pixels.resize(img.raster_bytes());
    for (int i = 0; i < w * h; ++i) {
        img.pixels[i * 3 + 0] = r;
        img.pixels[i * 3 + 1] = g;
        img.pixels[i * 3 + 2] = b;
    }
    return img;
}

inline LabeledImage random_image(const std::string& id, int w, int h, Rng& rng) {
    LabeledImage img;
    img.id = id;
    img.width_px = w;
    img.height_px = h;
    img.pixels.resize(img.raster_bytes());
    for (auto& px : img.pixels) px = static_cast<uint8_t>(rng.below(256));
    return img;
}

/// random box quantized to 6 decimals so label round-trips are exact
inline NormBox random_box(Rng& rng) {
    const double cx = rng.uniform(0.15, 0.85);
    const double cy = rng.uniform(0.15, 0.85);
    const double maxw = 2.0 * std::min(cx, 1.0 - cx);
    const double maxh = 2.0 * std::min(cy, 1.0 - cy);
    NormBox b;
    b.cx = std::round(cx * 1e6) / 1e6;
    b.cy = std::round(cy * 1e6) / 1e6;
    b.w = std::round(rng.uniform(0.05, maxw) * 1e6) / 1e6;
    b.h = std::round(rng.uniform(0.05, maxh) * 1e6) / 1e6;
    return b;
}

}  // namespace dunedetect::testing
