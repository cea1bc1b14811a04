#include "dunedetect/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace dunedetect {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// canonical detection order: score desc, then image id, then input order
std::vector<size_t> sorted_order(const std::vector<Detection>& dets,
                                 const std::vector<size_t>& subset) {
    std::vector<size_t> order = subset;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
        return dets[a].image_id < dets[b].image_id;
    });
    return order;
}

struct PRF {
    double precision = 0, recall = 0, f1 = 0;
    long long tp = 0, fp = 0, fn = 0;
};

/// operating-point counts at a fixed IoU threshold and confidence filter
PRF prf_at(const GroundTruth& gt, const std::vector<Detection>& dets, double conf_thr,
           double iou_thr) {
    PRF out;
    const long long gt_total = static_cast<long long>(gt.total_boxes());

    // (image, class) -> gt boxes and matched flags
    std::map<std::pair<std::string, int>, std::vector<NormBox>> gt_boxes;
    for (const auto& [img, anns] : gt.images)
        for (const auto& a : anns) gt_boxes[{img, a.class_id}].push_back(a.box);

    std::vector<size_t> kept;
    for (size_t i = 0; i < dets.size(); ++i)
        if (dets[i].score >= conf_thr) kept.push_back(i);

    std::map<std::pair<std::string, int>, std::vector<char>> matched;
    for (auto& [key, boxes] : gt_boxes) matched[key].assign(boxes.size(), 0);

    for (size_t idx : sorted_order(dets, kept)) {
        const Detection& d = dets[idx];
        auto it = gt_boxes.find({d.image_id, d.class_id});
        bool is_tp = false;
        if (it != gt_boxes.end()) {
            auto& flags = matched[it->first];
            double best = -1.0;
            size_t best_j = 0;
            for (size_t j = 0; j < it->second.size(); ++j) {
                if (flags[j]) continue;
                const double v = iou(d.box, it->second[j]);
                if (v > best) {
                    best = v;
                    best_j = j;
                }
            }
            if (best >= iou_thr) {
                flags[best_j] = 1;
                is_tp = true;
            }
        }
        is_tp ? ++out.tp : ++out.fp;
    }
    out.fn = gt_total - out.tp;
    const long long pred = out.tp + out.fp;
    out.precision = pred > 0 ? static_cast<double>(out.tp) / pred : 0.0;
    out.recall = gt_total > 0 ? static_cast<double>(out.tp) / gt_total : 0.0;
    out.f1 = (out.precision + out.recall) > 0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

}  // namespace

size_t GroundTruth::total_boxes() const {
    size_t n = 0;
    for (const auto& [_, anns] : images) n += anns.size();
    return n;
}

double iou(const NormBox& a, const NormBox& b) {
    const double ix = std::min(a.x1(), b.x1()) - std::max(a.x0(), b.x0());
    const double iy = std::min(a.y1(), b.y1()) - std::max(a.y0(), b.y0());
    const double inter = ix > 0 && iy > 0 ? ix * iy : 0.0;
    const double uni = a.area() + b.area() - inter;
    return uni > 0 ? inter / uni : 0.0;
}

std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thr) {
    for (const auto& d : dets)
        if (d.image_id != dets.front().image_id)
            throw InputError("nms expects detections from a single image");

    std::vector<size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
        return dets[a].class_id < dets[b].class_id;
    });

    std::vector<Detection> kept;
    for (size_t idx : order) {
        const Detection& d = dets[idx];
        bool suppressed = false;
        for (const auto& k : kept)
            if (k.class_id == d.class_id && iou(k.box, d.box) > iou_thr) {
                suppressed = true;
                break;
            }
        if (!suppressed) kept.push_back(d);
    }
    return kept;
}

MatchResult match_detections(const std::vector<NormBox>& gt,
                             const std::vector<Detection>& dets, double iou_thr) {
    MatchResult res;
    res.det_is_tp.assign(dets.size(), 0);
    res.gt_matched.assign(gt.size(), 0);

    std::vector<size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return dets[a].score > dets[b].score;
    });

    for (size_t idx : order) {
        double best = -1.0;
        size_t best_j = 0;
        for (size_t j = 0; j < gt.size(); ++j) {
            if (res.gt_matched[j]) continue;
            const double v = iou(dets[idx].box, gt[j]);
            if (v > best) {
                best = v;
                best_j = j;
            }
        }
        if (best >= iou_thr) {
            res.gt_matched[best_j] = 1;
            res.det_is_tp[idx] = 1;
        }
    }
    return res;
}

double average_precision(const std::vector<char>& tp_flags_by_score, long long gt_count,
                         bool all_point_interpolation) {
    if (gt_count < 0) throw InputError("negative gt count");
    if (gt_count == 0) return tp_flags_by_score.empty() ? kNaN : 0.0;

    const size_t n = tp_flags_by_score.size();
    std::vector<double> precision(n), recall(n);
    long long tp = 0;
    for (size_t i = 0; i < n; ++i) {
        tp += tp_flags_by_score[i] ? 1 : 0;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(gt_count);
    }
    // precision envelope: running max from the right
    for (size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

    if (all_point_interpolation) {
        double ap = 0.0;
        double prev_r = 0.0;
        for (size_t i = 0; i < n; ++i) {
            ap += (recall[i] - prev_r) * precision[i];
            prev_r = recall[i];
        }
        return ap;
    }

    double ap = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r = static_cast<double>(i) / 100.0;
        const auto it = std::lower_bound(recall.begin(), recall.end(), r);
        if (it != recall.end()) ap += precision[static_cast<size_t>(it - recall.begin())];
    }
    return ap / 101.0;
}

EvalReport evaluate(const GroundTruth& gt, const std::vector<Detection>& dets,
                    const EvalConfig& cfg) {
    for (const auto& d : dets) {
        if (!gt.images.count(d.image_id))
            throw InputError("detection references unknown image id '" + d.image_id + "'");
        if (d.class_id < 0 || d.class_id >= gt.class_count)
            throw InputError("detection class id " + std::to_string(d.class_id) +
                             " out of range");
        if (!(d.score >= 0.0 && d.score <= 1.0))
            throw InputError("detection score outside [0,1]");
    }

    EvalReport rep;
    rep.conf_thr = cfg.conf_thr;
    if (cfg.iou_thresholds.empty())
        for (int i = 0; i <= 9; ++i) rep.iou_thresholds.push_back((50 + 5 * i) / 100.0);
    else
        rep.iou_thresholds = cfg.iou_thresholds;

    const size_t nt = rep.iou_thresholds.size();
    std::vector<double> map_at(nt, 0.0);
    std::vector<size_t> classes_at(nt, 0);

    for (int c = 0; c < gt.class_count; ++c) {
        // ground truth slice for this class
        std::map<std::string, std::vector<NormBox>> gt_c;
        long long gt_total = 0;
        for (const auto& [img, anns] : gt.images)
            for (const auto& a : anns)
                if (a.class_id == c) {
                    gt_c[img].push_back(a.box);
                    ++gt_total;
                }

        std::vector<size_t> det_idx;
        for (size_t i = 0; i < dets.size(); ++i)
            if (dets[i].class_id == c) det_idx.push_back(i);
        const auto order = sorted_order(dets, det_idx);

        if (gt_total == 0 && order.empty()) {
            rep.per_class_ap[c].assign(nt, kNaN);  // undefined, excluded from the mean
            continue;
        }

        auto& aps = rep.per_class_ap[c];
        aps.resize(nt);
        for (size_t ti = 0; ti < nt; ++ti) {
            const double thr = rep.iou_thresholds[ti];
            std::map<std::string, std::vector<char>> used;
            for (const auto& [img, boxes] : gt_c) used[img].assign(boxes.size(), 0);

            std::vector<char> flags;
            flags.reserve(order.size());
            for (size_t idx : order) {
                const Detection& d = dets[idx];
                bool is_tp = false;
                auto it = gt_c.find(d.image_id);
                if (it != gt_c.end()) {
                    auto& flags_img = used[d.image_id];
                    double best = -1.0;
                    size_t best_j = 0;
                    for (size_t j = 0; j < it->second.size(); ++j) {
                        if (flags_img[j]) continue;
                        const double v = iou(d.box, it->second[j]);
                        if (v > best) {
                            best = v;
                            best_j = j;
                        }
                    }
                    if (best >= thr) {
                        flags_img[best_j] = 1;
                        is_tp = true;
                    }
                }
                flags.push_back(is_tp ? 1 : 0);
            }
            const double ap =
                average_precision(flags, gt_total, cfg.all_point_interpolation);
            aps[ti] = ap;
            if (!std::isnan(ap)) {
                map_at[ti] += ap;
                ++classes_at[ti];
            }
        }
    }

    for (size_t ti = 0; ti < nt; ++ti)
        map_at[ti] = classes_at[ti] > 0 ? map_at[ti] / classes_at[ti] : 0.0;

    rep.map50 = kNaN;
    rep.map75 = kNaN;
    double sum = 0.0;
    for (size_t ti = 0; ti < nt; ++ti) {
        sum += map_at[ti];
        if (std::abs(rep.iou_thresholds[ti] - 0.50) < 1e-9) rep.map50 = map_at[ti];
        if (std::abs(rep.iou_thresholds[ti] - 0.75) < 1e-9) rep.map75 = map_at[ti];
    }
    rep.map5095 = nt > 0 ? sum / static_cast<double>(nt) : 0.0;

    const PRF prf = prf_at(gt, dets, cfg.conf_thr, 0.5);
    rep.precision = prf.precision;
    rep.recall = prf.recall;
    rep.f1 = prf.f1;
    rep.tp = prf.tp;
    rep.fp = prf.fp;
    rep.fn = prf.fn;
    return rep;
}

std::vector<SweepPoint> confidence_sweep(const GroundTruth& gt,
                                         const std::vector<Detection>& dets, double step) {
    if (step <= 0 || step > 1) throw InputError("sweep step must be in (0,1]");
    std::vector<SweepPoint> out;
    const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double t = std::min(1.0, i * step);
        const PRF prf = prf_at(gt, dets, t, 0.5);
        out.push_back({t, prf.precision, prf.recall, prf.f1});
    }
    return out;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& sweep) {
    std::string out = "threshold,precision,recall,f1\n";
    char buf[160];
    for (const auto& p : sweep) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g\n", p.threshold, p.precision,
                      p.recall, p.f1);
        out += buf;
    }
    return out;
}

std::string EvalReport::to_json_string() const {
    json j;
    j["iou_thresholds"] = iou_thresholds;
    json pc = json::object();
    for (const auto& [cls, aps] : per_class_ap) pc[std::to_string(cls)] = aps;
    j["per_class_ap"] = pc;
    j["map50"] = map50;
    j["map75"] = map75;
    j["map5095"] = map5095;
    j["precision"] = precision;
    j["recall"] = recall;
    j["f1"] = f1;
    j["tp"] = tp;
    j["fp"] = fp;
    j["fn"] = fn;
    j["conf_thr"] = conf_thr;
    return j.dump(2) + "\n";
}

std::vector<Detection> parse_predictions(std::string_view text, int class_count) {
    std::vector<Detection> out;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        const std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        std::istringstream ss{std::string(line)};
        std::vector<std::string> toks;
        std::string tok;
        while (ss >> tok) toks.push_back(tok);
        if (toks.empty()) continue;
        if (toks.size() != 7)
            throw ParseError(line_no, "expected 7 fields, got " + std::to_string(toks.size()));

        Detection d;
        d.image_id = toks[0];
        const char* names[6] = {"class_id", "score", "cx", "cy", "w", "h"};
        double vals[6];
        for (int i = 0; i < 6; ++i) {
            const auto& t = toks[i + 1];
            auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), vals[i]);
            if (ec != std::errc{} || ptr != t.data() + t.size())
                throw ParseError(line_no,
                                 std::string("non-numeric ") + names[i] + " '" + t + "'");
        }
        if (vals[0] != std::floor(vals[0]) || vals[0] < 0 || vals[0] >= class_count)
            throw ParseError(line_no, "class_id out of range");
        d.class_id = static_cast<int>(vals[0]);
        if (!(vals[1] >= 0 && vals[1] <= 1))
            throw ParseError(line_no, "score outside [0,1]");
        d.score = vals[1];
        d.box = {vals[2], vals[3], vals[4], vals[5]};
        if (d.box.w <= 0 || d.box.h <= 0)
            throw ParseError(line_no, "box extent must be positive");
        if (!d.box.inside_unit())
            throw ParseError(line_no, "box extends past the image border");
        out.push_back(std::move(d));
    }
    return out;
}

std::string serialize_predictions(const std::vector<Detection>& dets) {
    std::string out;
    char buf[256];
    for (const auto& d : dets) {
        std::snprintf(buf, sizeof(buf), "%s %d %.6f %.6f %.6f %.6f %.6f\n",
                      d.image_id.c_str(), d.class_id, d.score, d.box.cx, d.box.cy, d.box.w,
                      d.box.h);
        out += buf;
    }
    return out;
}

}  // namespace dunedetect
