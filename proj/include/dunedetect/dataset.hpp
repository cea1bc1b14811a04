#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dunedetect/types.hpp"

namespace dunedetect {

/// Dataset descriptor file: class list, split ratios, and the split seed.
struct DatasetDescriptor {
    std::vector<std::string> classes{"plastic_bottle", "glass_bottle", "waste"};
    std::array<double, 3> split_ratio{0.6, 0.2, 0.2};
    uint64_t seed = 0;

    int class_count() const { return static_cast<int>(classes.size()); }

    std::string to_json_string() const;
    static DatasetDescriptor from_json_string(const std::string& text);
    static DatasetDescriptor load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;
};

/// Parses YOLO text labels: one `class_id cx cy w h` line per box.
/// Empty input means a negative image. Malformed lines, out-of-range class
/// ids, coordinates outside [0,1], and boxes crossing the image border are
/// reported as ParseError with a 1-based line number.
std::vector<Annotation> parse_label_file(std::string_view text, int class_count);

/// Inverse of parse_label_file, 6 fractional digits, LF line endings.
std::string serialize_labels(const std::vector<Annotation>& annotations);

/// Deterministic 60/20/20-style split: floor sizes, remainder to train then
/// val. Same (ids, ratio, seed) gives the same split on every platform.
DatasetSplit split_dataset(const std::vector<std::string>& ids,
                           const std::array<double, 3>& ratio, uint64_t seed);

struct DatasetManifest {
    std::map<std::string, size_t> split_counts;
    std::map<std::string, size_t> provenance_counts;
    std::map<std::string, size_t> class_box_counts;
    size_t total_images = 0;
    size_t total_boxes = 0;
    size_t boxes_clamped = 0;  // boxes clipped back into range by augmentation
    size_t boxes_dropped = 0;  // boxes removed by visibility thresholds

    std::string to_json_string() const;
};

DatasetManifest summarize(const std::vector<LabeledImage>& images,
                          const DatasetSplit& split, const DatasetDescriptor& desc);

/// Writes `images/{train,val,test}/<id>.png`, `labels/.../<id>.txt`, and
/// `descriptor.json` under dir. Label round-trips are bit-exact for
/// 6-decimal-quantized boxes. Negative images get an empty label file.
DatasetManifest write_dataset(const std::filesystem::path& dir,
                              const std::vector<LabeledImage>& images,
                              const DatasetSplit& split,
                              const DatasetDescriptor& desc);

struct LoadedDataset {
    std::vector<LabeledImage> images;
    DatasetSplit split;
    DatasetDescriptor desc;
};

/// Reads a directory written by write_dataset.
LoadedDataset read_dataset(const std::filesystem::path& dir);

}  // namespace dunedetect
