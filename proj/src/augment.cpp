#include "dunedetect/augment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace dunedetect {

namespace {

constexpr uint8_t kFillGray = 114;  // letterbox gray for out-of-source pixels

uint8_t clamp_u8(double v) {
    const long r = std::lround(v);
    return static_cast<uint8_t>(std::clamp(r, 0l, 255l));
}

double rect_intersection(double ax0, double ay0, double ax1, double ay1, double bx0,
                         double by0, double bx1, double by1) {
    const double w = std::min(ax1, bx1) - std::max(ax0, bx0);
    const double h = std::min(ay1, by1) - std::max(ay0, by0);
    return w > 0 && h > 0 ? w * h : 0.0;
}

/// Clips a remapped box to [lo,hi] and applies the visibility threshold.
/// Returns false when the box should be dropped.
bool clip_box(const NormBox& remapped, double lox, double loy, double hix, double hiy,
              double min_visibility, NormBox& out, BoxRemapStats* stats) {
    const double area_before = remapped.area();
    const double x0 = std::max(remapped.x0(), lox);
    const double y0 = std::max(remapped.y0(), loy);
    const double x1 = std::min(remapped.x1(), hix);
    const double y1 = std::min(remapped.y1(), hiy);
    const double area_after = (x1 - x0) * (y1 - y0);
    if (area_before <= 0.0 || x1 <= x0 || y1 <= y0 ||
        area_after < min_visibility * area_before) {
        if (stats) ++stats->dropped;
        return false;
    }
    if (x0 == remapped.x0() && y0 == remapped.y0() && x1 == remapped.x1() &&
        y1 == remapped.y1()) {
        out = remapped;  // untouched boxes keep their exact center form
        return true;
    }
    if (stats) ++stats->clamped;
    out = NormBox::from_corners(x0, y0, x1, y1);
    return true;
}

}  // namespace

GeomTransform GeomTransform::sample(Rng& rng) {
    GeomTransform t;
    t.hflip = rng.coin(0.5);
    t.scale = rng.uniform(0.5, 1.5);
    t.dx = rng.uniform(-0.2, 0.2);
    t.dy = rng.uniform(-0.2, 0.2);
    t.brightness = rng.uniform(-0.2, 0.2);
    t.contrast = rng.uniform(0.7, 1.3);
    return t;
}

void GeomTransform::map_point(double x, double y, double& ox, double& oy) const {
    // a*x + b form keeps the identity transform bit-exact
    const double fx = hflip ? 1.0 - x : x;
    ox = scale * fx + (0.5 * (1.0 - scale) + dx);
    oy = scale * y + (0.5 * (1.0 - scale) + dy);
}

LabeledImage apply_geom(const LabeledImage& img, const GeomTransform& t,
                        double min_visibility, BoxRemapStats* stats) {
    const int W = img.width_px, H = img.height_px;
    LabeledImage out;
    out.id = img.id;
    out.width_px = W;
    out.height_px = H;
    out.provenance = Provenance::geom;
    out.pixels.resize(img.raster_bytes());

    // pixels: inverse map with nearest-neighbor sampling
    const double bx = 0.5 * (1.0 - t.scale) + t.dx;
    const double by = 0.5 * (1.0 - t.scale) + t.dy;
    for (int py = 0; py < H; ++py) {
        for (int px = 0; px < W; ++px) {
            const double u = (px + 0.5) / W;
            const double v = (py + 0.5) / H;
            double iu = (u - bx) / t.scale;
            const double iv = (v - by) / t.scale;
            if (t.hflip) iu = 1.0 - iu;
            const int sx = static_cast<int>(std::floor(iu * W));
            const int sy = static_cast<int>(std::floor(iv * H));
            uint8_t* dst = out.px(px, py);
            if (sx >= 0 && sx < W && sy >= 0 && sy < H) {
                const uint8_t* src = img.px(sx, sy);
                for (int c = 0; c < 3; ++c)
                    dst[c] = clamp_u8(t.contrast * (src[c] - 128.0) + 128.0 +
                                      t.brightness * 255.0);
            } else {
                dst[0] = dst[1] = dst[2] = clamp_u8(
                    t.contrast * (kFillGray - 128.0) + 128.0 + t.brightness * 255.0);
            }
        }
    }

    // boxes: the same affine map in center form, then clip to the image
    for (const auto& a : img.annotations) {
        NormBox moved;
        t.map_point(a.box.cx, a.box.cy, moved.cx, moved.cy);
        moved.w = t.scale * a.box.w;
        moved.h = t.scale * a.box.h;
        NormBox clipped;
        if (clip_box(moved, 0, 0, 1, 1, min_visibility, clipped, stats))
            out.annotations.push_back({a.class_id, clipped});
    }
    return out;
}

LabeledImage mosaic(const std::array<const LabeledImage*, 4>& imgs, int canvas_side,
                    double center_jitter, uint64_t seed, double min_visibility,
                    BoxRemapStats* stats) {
    if (canvas_side < 2) throw ValidationError("mosaic canvas side must be >= 2 px");
    for (const auto* im : imgs) {
        if (!im) throw ValidationError("mosaic requires 4 images");
        im->validate();
    }
    const int L = canvas_side;
    Rng rng(seed);
    const int mx = static_cast<int>(std::clamp<long>(
        std::lround(L * (0.5 + rng.uniform(-center_jitter, center_jitter))), 1, L - 1));
    const int my = static_cast<int>(std::clamp<long>(
        std::lround(L * (0.5 + rng.uniform(-center_jitter, center_jitter))), 1, L - 1));

    LabeledImage out;
    out.id = imgs[0]->id;
    out.width_px = out.height_px = L;
    out.provenance = Provenance::mosaic;
    out.pixels.assign(out.raster_bytes(), kFillGray);

    // quadrant rects, half-open, in canvas pixels: TL, TR, BL, BR
    const int qx0[4] = {0, mx, 0, mx};
    const int qy0[4] = {0, 0, my, my};
    const int qx1[4] = {mx, L, mx, L};
    const int qy1[4] = {my, my, L, L};

    for (int q = 0; q < 4; ++q) {
        const LabeledImage& src = *imgs[q];
        const int iw = src.width_px, ih = src.height_px;
        const double qw = qx1[q] - qx0[q], qh = qy1[q] - qy0[q];
        // uniform scale to cover the quadrant, anchored at the center corner
        const double s = std::max(qw / iw, qh / ih);
        const double ox = (q == 0 || q == 2) ? mx - s * iw : mx;
        const double oy = (q == 0 || q == 1) ? my - s * ih : my;

        for (int py = qy0[q]; py < qy1[q]; ++py) {
            for (int px = qx0[q]; px < qx1[q]; ++px) {
                const int sx = std::clamp(
                    static_cast<int>(std::floor((px + 0.5 - ox) / s)), 0, iw - 1);
                const int sy = std::clamp(
                    static_cast<int>(std::floor((py + 0.5 - oy) / s)), 0, ih - 1);
                const uint8_t* sp = src.px(sx, sy);
                uint8_t* dp = out.px(px, py);
                dp[0] = sp[0];
                dp[1] = sp[1];
                dp[2] = sp[2];
            }
        }

        for (const auto& a : src.annotations) {
            const double rx0 = (ox + s * (a.box.x0() * iw)) / L;
            const double ry0 = (oy + s * (a.box.y0() * ih)) / L;
            const double rx1 = (ox + s * (a.box.x1() * iw)) / L;
            const double ry1 = (oy + s * (a.box.y1() * ih)) / L;
            NormBox clipped;
            if (clip_box(NormBox::from_corners(rx0, ry0, rx1, ry1),
                         static_cast<double>(qx0[q]) / L, static_cast<double>(qy0[q]) / L,
                         static_cast<double>(qx1[q]) / L, static_cast<double>(qy1[q]) / L,
                         min_visibility, clipped, stats))
                out.annotations.push_back({a.class_id, clipped});
        }
    }
    return out;
}

LabeledImage cutmix(const LabeledImage& base, const LabeledImage& donor, double patch_frac,
                    uint64_t seed, double transfer_thr, BoxRemapStats* stats) {
    if (!(patch_frac >= 0.1 && patch_frac <= 0.4))
        throw ValidationError("cutmix patch_frac must be in [0.1, 0.4]");
    base.validate();
    donor.validate();

    const int W = base.width_px, H = base.height_px;
    const int DW = donor.width_px, DH = donor.height_px;
    const double side = std::sqrt(patch_frac);
    const int pw = static_cast<int>(std::clamp<long>(std::lround(W * side), 1, W));
    const int ph = static_cast<int>(std::clamp<long>(std::lround(H * side), 1, H));
    const int spw = static_cast<int>(std::clamp<long>(std::lround(DW * side), 1, DW));
    const int sph = static_cast<int>(std::clamp<long>(std::lround(DH * side), 1, DH));

    Rng rng(seed);
    const int dx0 = static_cast<int>(rng.below(W - pw + 1));
    const int dy0 = static_cast<int>(rng.below(H - ph + 1));
    const int sx0 = static_cast<int>(rng.below(DW - spw + 1));
    const int sy0 = static_cast<int>(rng.below(DH - sph + 1));

    LabeledImage out;
    out.id = base.id;
    out.width_px = W;
    out.height_px = H;
    out.provenance = Provenance::cutmix;
    out.pixels = base.pixels;

    // patch pixels come verbatim from the donor
    for (int y = 0; y < ph; ++y) {
        const int sy = sy0 + static_cast<int>(static_cast<long>(y) * sph / ph);
        for (int x = 0; x < pw; ++x) {
            const int sx = sx0 + static_cast<int>(static_cast<long>(x) * spw / pw);
            const uint8_t* sp = donor.px(sx, sy);
            uint8_t* dp = out.px(dx0 + x, dy0 + y);
            dp[0] = sp[0];
            dp[1] = sp[1];
            dp[2] = sp[2];
        }
    }

    // normalized rects
    const double Dx0 = static_cast<double>(dx0) / W, Dy0 = static_cast<double>(dy0) / H;
    const double Dx1 = static_cast<double>(dx0 + pw) / W, Dy1 = static_cast<double>(dy0 + ph) / H;
    const double Sx0 = static_cast<double>(sx0) / DW, Sy0 = static_cast<double>(sy0) / DH;
    const double Sx1 = static_cast<double>(sx0 + spw) / DW, Sy1 = static_cast<double>(sy0 + sph) / DH;

    // base boxes: removed when mostly occluded by the patch, otherwise kept
    for (const auto& a : base.annotations) {
        const double occl = rect_intersection(a.box.x0(), a.box.y0(), a.box.x1(), a.box.y1(),
                                              Dx0, Dy0, Dx1, Dy1) /
                            a.box.area();
        if (occl >= transfer_thr) {
            if (stats) ++stats->dropped;
            continue;
        }
        out.annotations.push_back(a);
    }

    // donor boxes: transferred when mostly inside the source rect
    const double sxr = (Dx1 - Dx0) / (Sx1 - Sx0);
    const double syr = (Dy1 - Dy0) / (Sy1 - Sy0);
    for (const auto& a : donor.annotations) {
        const double vis = rect_intersection(a.box.x0(), a.box.y0(), a.box.x1(), a.box.y1(),
                                             Sx0, Sy0, Sx1, Sy1) /
                           a.box.area();
        if (vis < transfer_thr) continue;
        const double cx0 = std::max(a.box.x0(), Sx0), cy0 = std::max(a.box.y0(), Sy0);
        const double cx1 = std::min(a.box.x1(), Sx1), cy1 = std::min(a.box.y1(), Sy1);
        if (stats && (cx0 != a.box.x0() || cy0 != a.box.y0() || cx1 != a.box.x1() ||
                      cy1 != a.box.y1()))
            ++stats->clamped;
        const NormBox moved = NormBox::from_corners(
            Dx0 + (cx0 - Sx0) * sxr, Dy0 + (cy0 - Sy0) * syr, Dx0 + (cx1 - Sx0) * sxr,
            Dy0 + (cy1 - Sy0) * syr);
        out.annotations.push_back({a.class_id, moved});
    }
    return out;
}

std::vector<LabeledImage> inject_negatives(std::vector<LabeledImage> dataset,
                                           const std::vector<LabeledImage>& negatives) {
    for (const auto& neg : negatives) {
        if (!neg.annotations.empty())
            throw ValidationError("negative image '" + neg.id + "' carries " +
                                  std::to_string(neg.annotations.size()) + " annotations");
        LabeledImage copy = neg;
        copy.provenance = Provenance::negative;
        copy.validate();
        dataset.push_back(std::move(copy));
    }
    return dataset;
}

namespace {

enum class AugOp { geom, cutmix, mosaic };

struct AugJob {
    size_t source = 0;  // index into the source set
    AugOp op = AugOp::geom;
    int copy = 0;
    uint64_t seed = 0;
    std::string out_id;
};

LabeledImage run_job(const AugJob& job, const std::vector<const LabeledImage*>& sources,
                     const AugConfig& cfg, BoxRemapStats* stats) {
    const LabeledImage& src = *sources[job.source];
    Rng rng(job.seed);
    LabeledImage out;
    switch (job.op) {
        case AugOp::geom: {
            const GeomTransform t = GeomTransform::sample(rng);
            out = apply_geom(src, t, cfg.min_visibility, stats);
            break;
        }
        case AugOp::cutmix: {
            const size_t donor = rng.below(sources.size());
            const double frac = rng.uniform(cfg.patch_frac_lo, cfg.patch_frac_hi);
            out = cutmix(src, *sources[donor], frac, rng.next_u64(), cfg.cutmix_transfer,
                         stats);
            break;
        }
        case AugOp::mosaic: {
            std::array<const LabeledImage*, 4> tiles{&src, nullptr, nullptr, nullptr};
            for (int i = 1; i < 4; ++i) tiles[i] = sources[rng.below(sources.size())];
            const int canvas = std::max(src.width_px, src.height_px);
            out = mosaic(tiles, canvas, cfg.center_jitter, rng.next_u64(),
                         cfg.min_visibility, stats);
            break;
        }
    }
    out.id = job.out_id;
    return out;
}

}  // namespace

VariantResult generate_variant(const std::vector<LabeledImage>& raw,
                               const std::vector<LabeledImage>& negatives,
                               const AugConfig& cfg, const DatasetDescriptor& desc) {
    if (raw.empty()) throw ValidationError("generate_variant: empty input dataset");
    if (cfg.num_geom < 0 || cfg.num_cutmix < 0 || cfg.num_mosaic < 0)
        throw ValidationError("augmentation counts must be >= 0");

    size_t neg_count = negatives.size();
    if (cfg.negatives >= 0) {
        if (static_cast<size_t>(cfg.negatives) > negatives.size())
            throw ValidationError("requested " + std::to_string(cfg.negatives) +
                                  " negatives, only " + std::to_string(negatives.size()) +
                                  " provided");
        neg_count = static_cast<size_t>(cfg.negatives);
    }

    std::vector<LabeledImage> pool = raw;
    for (auto& img : pool) img.validate(desc.class_count());
    pool = inject_negatives(std::move(pool),
                            {negatives.begin(), negatives.begin() + neg_count});

    std::vector<std::string> pool_ids;
    pool_ids.reserve(pool.size());
    for (const auto& img : pool) pool_ids.push_back(img.id);

    // the source set for augmentation: whole pool when splitting afterwards,
    // train images only when splitting first (leak-safe)
    DatasetSplit presplit;
    std::vector<const LabeledImage*> sources;
    if (cfg.paper_faithful_split) {
        for (const auto& img : pool) sources.push_back(&img);
    } else {
        presplit = split_dataset(pool_ids, desc.split_ratio, desc.seed);
        std::unordered_map<std::string_view, const LabeledImage*> by_id;
        for (const auto& img : pool) by_id.emplace(img.id, &img);
        for (const auto& id : presplit.train) sources.push_back(by_id.at(id));
    }

    std::vector<AugJob> jobs;
    for (size_t si = 0; si < sources.size(); ++si) {
        const std::string& sid = sources[si]->id;
        const uint64_t idh = fnv1a64(sid);
        for (int k = 0; k < cfg.num_geom; ++k)
            jobs.push_back({si, AugOp::geom, k, derive_seed(cfg.seed, "geom", idh, k),
                            sid + "-geom" + std::to_string(k)});
        for (int k = 0; k < cfg.num_cutmix; ++k)
            jobs.push_back({si, AugOp::cutmix, k, derive_seed(cfg.seed, "cutmix", idh, k),
                            sid + "-cutmix" + std::to_string(k)});
        for (int k = 0; k < cfg.num_mosaic; ++k)
            jobs.push_back({si, AugOp::mosaic, k, derive_seed(cfg.seed, "mosaic", idh, k),
                            sid + "-mosaic" + std::to_string(k)});
    }

    // every job is independently seeded, so scheduling cannot change results
    std::vector<LabeledImage> produced(jobs.size());
    std::vector<BoxRemapStats> job_stats(jobs.size());
    const int threads = std::max(1, cfg.threads);
    if (threads == 1 || jobs.size() < 2) {
        for (size_t i = 0; i < jobs.size(); ++i)
            produced[i] = run_job(jobs[i], sources, cfg, &job_stats[i]);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
                produced[i] = run_job(jobs[i], sources, cfg, &job_stats[i]);
        };
        std::vector<std::thread> ts;
        for (int t = 0; t < threads; ++t) ts.emplace_back(worker);
        for (auto& t : ts) t.join();
    }

    VariantResult out;
    out.images = std::move(pool);
    for (auto& img : produced) out.images.push_back(std::move(img));

    if (cfg.paper_faithful_split) {
        std::vector<std::string> all_ids;
        all_ids.reserve(out.images.size());
        for (const auto& img : out.images) all_ids.push_back(img.id);
        out.split = split_dataset(all_ids, desc.split_ratio, desc.seed);
    } else {
        out.split = presplit;
        for (const auto& job : jobs) out.split.train.push_back(job.out_id);
    }

    out.manifest = summarize(out.images, out.split, desc);
    for (const auto& s : job_stats) {
        out.manifest.boxes_clamped += s.clamped;
        out.manifest.boxes_dropped += s.dropped;
    }
    return out;
}

}  // namespace dunedetect
