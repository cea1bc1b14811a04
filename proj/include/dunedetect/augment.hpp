#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dunedetect/dataset.hpp"
#include "dunedetect/rng.hpp"
#include "dunedetect/types.hpp"

namespace dunedetect {

/// One sampled geometric/photometric transform. Parameter ranges:
/// scale [0.5,1.5], translate [-0.2,0.2], brightness [-0.2,0.2] of full
/// range, contrast [0.7,1.3].
struct GeomTransform {
    bool hflip = false;
    double scale = 1.0;
    double dx = 0.0;
    double dy = 0.0;
    double brightness = 0.0;
    double contrast = 1.0;

    static GeomTransform identity() { return {}; }
    static GeomTransform sample(Rng& rng);

    /// forward affine map on normalized coordinates (flip, then scale about
    /// the image center, then translate)
    void map_point(double x, double y, double& ox, double& oy) const;
};

struct AugConfig {
    int num_geom = 0;
    int num_cutmix = 0;
    int num_mosaic = 0;
    int negatives = -1;  // how many negatives to inject; -1 = all provided
    uint64_t seed = 0;
    bool paper_faithful_split = false;  // true: augment everything, split after

    double min_visibility = 0.25;   // surviving area fraction after clipping
    double cutmix_transfer = 0.5;   // donor visibility / base occlusion threshold
    double center_jitter = 0.2;     // mosaic center jitter as canvas fraction
    double patch_frac_lo = 0.1;     // cutmix patch area range
    double patch_frac_hi = 0.4;
    int threads = 1;
};

struct BoxRemapStats {
    size_t clamped = 0;
    size_t dropped = 0;
};

/// Applies the affine map to pixels (nearest-neighbor, gray fill outside the
/// source) and remaps every box by the same map. Boxes keeping less than
/// min_visibility of their remapped area after clipping are dropped.
LabeledImage apply_geom(const LabeledImage& img, const GeomTransform& t,
                        double min_visibility = 0.25, BoxRemapStats* stats = nullptr);

/// Composites four images into the quadrants of a canvas_side^2 canvas split
/// at a jittered center. Each input is uniformly scaled to cover its
/// quadrant, anchored at the center corner, and cropped; boxes are remapped
/// and clipped to their quadrant.
LabeledImage mosaic(const std::array<const LabeledImage*, 4>& imgs, int canvas_side,
                    double center_jitter, uint64_t seed,
                    double min_visibility = 0.25, BoxRemapStats* stats = nullptr);

/// Pastes a rectangular donor patch (area = patch_frac of the base canvas,
/// uniformly placed in both images) onto the base. Donor boxes at least
/// `transfer_thr` inside the patch transfer with it; base boxes occluded by
/// at least `transfer_thr` are removed, the rest stay unchanged.
LabeledImage cutmix(const LabeledImage& base, const LabeledImage& donor,
                    double patch_frac, uint64_t seed,
                    double transfer_thr = 0.5, BoxRemapStats* stats = nullptr);

/// Appends negatives (validated to carry zero annotations) with
/// provenance = negative.
std::vector<LabeledImage> inject_negatives(std::vector<LabeledImage> dataset,
                                           const std::vector<LabeledImage>& negatives);

struct VariantResult {
    std::vector<LabeledImage> images;
    DatasetSplit split;
    DatasetManifest manifest;
};

/// Builds one dataset variant: negative injection, then per-image
/// augmentation counts. paper_faithful_split=false splits first and augments
/// the train set only; true augments the whole pool and splits afterwards
/// (reproduces the table-style counts at the cost of val/test leakage).
/// Deterministic for a fixed cfg.seed regardless of cfg.threads.
VariantResult generate_variant(const std::vector<LabeledImage>& raw,
                               const std::vector<LabeledImage>& negatives,
                               const AugConfig& cfg, const DatasetDescriptor& desc);

}  // namespace dunedetect
