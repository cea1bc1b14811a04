#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dunedetect/types.hpp"

namespace dunedetect {

struct Detection {
    std::string image_id;
    int class_id = 0;
    double score = 0.0;
    NormBox box;
};

struct GroundTruth {
    std::map<std::string, std::vector<Annotation>> images;  // image id -> boxes
    int class_count = 0;

    size_t total_boxes() const;
};

struct EvalConfig {
    double conf_thr = 0.25;                 // operating point for P/R/F1
    std::vector<double> iou_thresholds;     // empty = 0.50:0.95:0.05
    bool all_point_interpolation = false;   // alternative to 101-point AP
};

struct EvalReport {
    std::vector<double> iou_thresholds;
    // class id -> AP per threshold; NaN marks "undefined, excluded from mean"
    std::map<int, std::vector<double>> per_class_ap;
    double map50 = 0.0;
    double map75 = 0.0;
    double map5095 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    double conf_thr = 0.25;

    std::string to_json_string() const;
};

double iou(const NormBox& a, const NormBox& b);

/// Greedy class-wise suppression by descending score; ties broken by lower
/// class id, then input order. Output stays sorted the same way.
std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thr);

struct MatchResult {
    std::vector<char> det_is_tp;   // aligned with the input detections
    std::vector<char> gt_matched;  // aligned with the input ground truth
};

/// Single image, single class slice. Detections are processed in descending
/// score order (stable on ties); each takes the unmatched ground-truth box
/// with the highest IoU >= iou_thr, and each ground truth matches once.
MatchResult match_detections(const std::vector<NormBox>& gt,
                             const std::vector<Detection>& dets, double iou_thr);

/// COCO-style 101-point interpolated AP over score-ordered TP flags.
/// Returns NaN when gt_count == 0 and there are no detections (class is
/// excluded from the mean); 0 when gt_count == 0 but detections exist.
double average_precision(const std::vector<char>& tp_flags_by_score, long long gt_count,
                         bool all_point_interpolation = false);

/// Full metric suite: per-class AP at every threshold, mAP means, and the
/// P/R/F1 operating point at IoU 0.5 with score >= conf_thr.
EvalReport evaluate(const GroundTruth& gt, const std::vector<Detection>& dets,
                    const EvalConfig& cfg = {});

struct SweepPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Confidence sweep at IoU 0.5 (plot-ready precision/recall/F1 curves).
std::vector<SweepPoint> confidence_sweep(const GroundTruth& gt,
                                         const std::vector<Detection>& dets,
                                         double step = 0.05);

std::string sweep_to_csv(const std::vector<SweepPoint>& sweep);

/// Predictions file: one `image_id class_id score cx cy w h` line per box.
std::vector<Detection> parse_predictions(std::string_view text, int class_count);
std::string serialize_predictions(const std::vector<Detection>& dets);

}  // namespace dunedetect
