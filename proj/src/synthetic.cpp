#include "dunedetect/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "dunedetect/rng.hpp"

namespace dunedetect {

namespace {

struct PaintBounds {
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    bool any() const { return x1 >= 0; }
    void add(int x, int y) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
    }
};

void put(LabeledImage& img, int x, int y, uint8_t v, PaintBounds& b) {
    uint8_t* p = img.px(x, y);
    p[0] = p[1] = p[2] = v;
    b.add(x, y);
}

/// paints one shape into the sz x sz cell anchored at (x0,y0); returns the
/// painted-pixel bounds
PaintBounds paint_shape(LabeledImage& img, int cls, int x0, int y0, int sz, uint8_t v) {
    PaintBounds b;
    switch (cls) {
        case 0:  // filled square
            for (int y = 0; y < sz; ++y)
                for (int x = 0; x < sz; ++x) put(img, x0 + x, y0 + y, v, b);
            break;
        case 1: {  // filled disk
            const double r = sz / 2.0;
            const double cx = x0 + r - 0.5, cy = y0 + r - 0.5;
            for (int y = 0; y < sz; ++y)
                for (int x = 0; x < sz; ++x) {
                    const double dx = x0 + x - cx, dy = y0 + y - cy;
                    if (dx * dx + dy * dy <= r * r - 0.25) put(img, x0 + x, y0 + y, v, b);
                }
            break;
        }
        case 2:  // filled up-pointing triangle
            for (int y = 0; y < sz; ++y) {
                // row y spans a width growing linearly towards the base
                const int half = static_cast<int>(
                    std::floor((y + 1) * (sz / 2.0) / sz));
                const int mid = x0 + sz / 2;
                for (int x = mid - half; x <= mid + half && x < x0 + sz; ++x)
                    if (x >= x0) put(img, x, y0 + y, v, b);
            }
            break;
        case 3: {  // plus sign
            const int arm = std::max(1, sz / 3);
            const int lo = (sz - arm) / 2;
            for (int y = 0; y < sz; ++y)
                for (int x = 0; x < sz; ++x)
                    if ((x >= lo && x < lo + arm) || (y >= lo && y < lo + arm))
                        put(img, x0 + x, y0 + y, v, b);
            break;
        }
        default: break;
    }
    return b;
}

bool rects_overlap(int ax0, int ay0, int ax1, int ay1, int bx0, int by0, int bx1, int by1) {
    return ax0 <= bx1 && bx0 <= ax1 && ay0 <= by1 && by0 <= ay1;
}

}  // namespace

std::vector<LabeledImage> make_synthetic_shapes(int n, int side, int classes,
                                                uint64_t seed) {
    if (n < 0) throw ValidationError("synthetic: n must be >= 0");
    if (side < 16) throw ValidationError("synthetic: side must be >= 16");
    if (classes < 1 || classes > kMaxShapeClasses)
        throw ValidationError("synthetic: classes must be in [1," +
                              std::to_string(kMaxShapeClasses) + "]");

    const int size_lo = std::max(5, side * 3 / 16);
    const int size_hi = std::max(size_lo + 1, side * 3 / 8);

    std::vector<LabeledImage> out;
    out.reserve(static_cast<size_t>(n));
    char idbuf[32];
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, "synth", static_cast<uint64_t>(i)));
        LabeledImage img;
        std::snprintf(idbuf, sizeof(idbuf), "synth-%06d", i);
        img.id = idbuf;
        img.width_px = img.height_px = side;
        img.pixels.resize(img.raster_bytes());

        // noisy dark background, well below the shape threshold
        for (int p = 0; p < side * side; ++p) {
            const uint8_t v = static_cast<uint8_t>(10 + rng.below(50));
            uint8_t* px = img.pixels.data() + static_cast<size_t>(p) * 3;
            px[0] = px[1] = px[2] = v;
        }

        const int want = 1 + static_cast<int>(rng.below(3));
        std::vector<std::array<int, 4>> placed;  // occupied rects with margin
        for (int s = 0; s < want; ++s) {
            const int cls = static_cast<int>(rng.below(static_cast<uint64_t>(classes)));
            const uint8_t v = static_cast<uint8_t>(170 + rng.below(86));
            bool ok = false;
            for (int attempt = 0; attempt < 20 && !ok; ++attempt) {
                const int sz =
                    size_lo + static_cast<int>(rng.below(static_cast<uint64_t>(
                                  size_hi - size_lo + 1)));
                const int x0 = 1 + static_cast<int>(rng.below(
                                       static_cast<uint64_t>(side - sz - 1)));
                const int y0 = 1 + static_cast<int>(rng.below(
                                       static_cast<uint64_t>(side - sz - 1)));
                bool clash = false;
                for (const auto& r : placed)
                    if (rects_overlap(x0 - 1, y0 - 1, x0 + sz, y0 + sz, r[0], r[1], r[2],
                                      r[3])) {
                        clash = true;
                        break;
                    }
                if (clash) continue;

                const PaintBounds b = paint_shape(img, cls, x0, y0, sz, v);
                if (!b.any()) break;
                placed.push_back({b.x0 - 1, b.y0 - 1, b.x1 + 1, b.y1 + 1});
                // tight box from the painted pixel extents
                NormBox box;
                box.cx = (b.x0 + b.x1 + 1) / 2.0 / side;
                box.cy = (b.y0 + b.y1 + 1) / 2.0 / side;
                box.w = static_cast<double>(b.x1 - b.x0 + 1) / side;
                box.h = static_cast<double>(b.y1 - b.y0 + 1) / side;
                img.annotations.push_back({cls, box});
                ok = true;
            }
        }
        out.push_back(std::move(img));
    }
    return out;
}

}  // namespace dunedetect
