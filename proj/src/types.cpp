#include "dunedetect/types.hpp"

namespace dunedetect {

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::raw: return "raw";
        case Provenance::negative: return "negative";
        case Provenance::geom: return "geom";
        case Provenance::mosaic: return "mosaic";
        case Provenance::cutmix: return "cutmix";
    }
    return "raw";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "raw") return Provenance::raw;
    if (s == "negative") return Provenance::negative;
    if (s == "geom") return Provenance::geom;
    if (s == "mosaic") return Provenance::mosaic;
    if (s == "cutmix") return Provenance::cutmix;
    throw ValidationError("unknown provenance '" + s + "'");
}

void LabeledImage::validate(int class_count) const {
    if (id.empty()) throw ValidationError("image with empty id");
    if (width_px <= 0 || height_px <= 0)
        throw ValidationError("image '" + id + "': non-positive dimensions");
    if (pixels.size() != raster_bytes())
        throw ValidationError("image '" + id + "': raster has " +
                              std::to_string(pixels.size()) + " bytes, expected " +
                              std::to_string(raster_bytes()));
    if (provenance == Provenance::negative && !annotations.empty())
        throw ValidationError("image '" + id + "': negative image carries " +
                              std::to_string(annotations.size()) + " annotations");
    for (const auto& a : annotations) {
        if (class_count >= 0 && (a.class_id < 0 || a.class_id >= class_count))
            throw ValidationError("image '" + id + "': class_id " +
                                  std::to_string(a.class_id) + " out of range");
        if (a.box.w <= 0 || a.box.h <= 0)
            throw ValidationError("image '" + id + "': box with non-positive extent");
        if (!a.box.inside_unit())
            throw ValidationError("image '" + id + "': box extends past the image border");
    }
}

}  // namespace dunedetect
