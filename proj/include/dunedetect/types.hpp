#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dunedetect {

/// tolerance for box-extent checks against the image border
inline constexpr double kBoxEdgeTol = 1e-6;

// Errors that should surface as exit code 2 (bad input or configuration).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : InputError {
    ParseError(int line_no, const std::string& msg)
        : InputError("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    int line;
};

struct ValidationError : InputError {
    using InputError::InputError;
};

struct IoError : InputError {
    using InputError::InputError;
};

/// Axis-aligned box in center format, all fields normalized to [0,1].
struct NormBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    double x0() const { return cx - w / 2.0; }
    double x1() const { return cx + w / 2.0; }
    double y0() const { return cy - h / 2.0; }
    double y1() const { return cy + h / 2.0; }
    double area() const { return w * h; }

    static NormBox from_corners(double x0, double y0, double x1, double y1) {
        return NormBox{(x0 + x1) / 2.0, (y0 + y1) / 2.0, x1 - x0, y1 - y0};
    }

    bool inside_unit(double tol = kBoxEdgeTol) const {
        return x0() >= -tol && x1() <= 1.0 + tol && y0() >= -tol && y1() <= 1.0 + tol;
    }

    bool operator==(const NormBox&) const = default;
};

struct Annotation {
    int class_id = 0;
    NormBox box;

    bool operator==(const Annotation&) const = default;
};

enum class Provenance { raw, negative, geom, mosaic, cutmix };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// Pixels plus annotations; the unit flowing through augmentation.
/// `pixels` is a row-major 8-bit RGB raster, 3 bytes per pixel.
struct LabeledImage {
    std::string id;
    int width_px = 0;
    int height_px = 0;
    std::vector<uint8_t> pixels;
    std::vector<Annotation> annotations;
    Provenance provenance = Provenance::raw;

    size_t raster_bytes() const {
        return static_cast<size_t>(width_px) * static_cast<size_t>(height_px) * 3u;
    }

    const uint8_t* px(int x, int y) const {
        return pixels.data() + (static_cast<size_t>(y) * width_px + x) * 3u;
    }
    uint8_t* px(int x, int y) {
        return pixels.data() + (static_cast<size_t>(y) * width_px + x) * 3u;
    }

    /// raster geometry, box ranges, and the negative-images-have-no-boxes rule
    void validate(int class_count = -1) const;
};

struct DatasetSplit {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
    std::array<double, 3> split_ratio{0.6, 0.2, 0.2};

    size_t total() const { return train.size() + val.size() + test.size(); }
};

}  // namespace dunedetect
