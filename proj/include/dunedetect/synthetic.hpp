#pragma once

#include <cstdint>
#include <vector>

#include "dunedetect/types.hpp"

namespace dunedetect {

/// Synthetic detection set: noisy dark background plus 1-3 bright,
/// non-overlapping shapes per image (one shape family per class: square,
/// disk, triangle, cross). Boxes are derived from the painted pixel extents,
/// so they are tight by construction. Deterministic per seed.
std::vector<LabeledImage> make_synthetic_shapes(int n, int side, int classes,
                                                uint64_t seed);

/// maximum number of distinct shape classes the generator supports
inline constexpr int kMaxShapeClasses = 4;

/// background pixels stay strictly below, shape pixels strictly above
inline constexpr uint8_t kShapeThreshold = 128;

}  // namespace dunedetect
