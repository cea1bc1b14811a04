#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dunedetect/eval.hpp"
#include "dunedetect/types.hpp"

namespace dunedetect {

/// Grid detector surrogate: a stack of stride-2 3x3 tanh convolutions over a
/// single-channel input, then a 1x1 head emitting per-cell objectness, box
/// offsets (tx,ty,tw,th), and class logits. With no hidden layers the model
/// degenerates to one linear patchify convolution (used by the convexity
/// checks).
struct ToyDetectorConfig {
    int input_side = 32;
    int grid = 8;
    int classes = 3;
    std::vector<int> hidden{8, 16};

    int cell_attrs() const { return 5 + classes; }
    void validate() const;
};

struct LayoutEntry {
    std::string name;
    std::vector<int> shape;
    size_t offset = 0;
    size_t size = 0;
};

class ToyDetector {
public:
    explicit ToyDetector(ToyDetectorConfig cfg);

    static ToyDetector random_init(const ToyDetectorConfig& cfg, uint64_t seed);

    const ToyDetectorConfig& config() const { return cfg_; }
    const std::vector<LayoutEntry>& layout() const { return layout_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    void save(const std::filesystem::path& file) const;
    static ToyDetector load(const std::filesystem::path& file);

private:
    ToyDetectorConfig cfg_;
    std::vector<LayoutEntry> layout_;
    std::vector<double> params_;
};

/// Raw grid predictions, laid out per cell: (gy*G+gx)*(5+C) + attribute,
/// attributes ordered [obj, tx, ty, tw, th, class logits...].
struct GridPred {
    int grid = 0;
    int classes = 0;
    std::vector<double> data;

    double at(int gx, int gy, int attr) const {
        return data[(static_cast<size_t>(gy) * grid + gx) * (5 + classes) + attr];
    }
};

/// mean(RGB)/255 grayscale plane, row-major, values in [0,1]
std::vector<double> to_gray(const LabeledImage& img);

GridPred forward(const ToyDetector& det, std::span<const double> img);

/// Loss on decoded predictions: objectness BCE over all cells (non-object
/// cells down-weighted), squared error on box offsets and class cross-entropy
/// on positive cells. Pure function of (preds, gt); the gradient route in
/// detection_loss matches it exactly.
double loss_from_preds(const GridPred& preds, const std::vector<Annotation>& gt);

struct LossGrads {
    double loss = 0.0;
    std::vector<double> dparams;
    std::vector<double> dinput;
};

/// Loss plus exact analytic gradients w.r.t. both parameters and input
/// pixels. objectness_only restricts the loss to the objectness BCE term
/// (the "hide the objects" ascent target).
LossGrads detection_loss(const ToyDetector& det, std::span<const double> img,
                         const std::vector<Annotation>& gt,
                         bool objectness_only = false);

enum class SATMode { sign_ascent, objectness_hide };

struct SATConfig {
    double epsilon = 0.03;    // per-pixel bound, normalized pixel units
    double apply_prob = 0.5;  // fraction of batches perturbed
    SATMode mode = SATMode::sign_ascent;
};

/// FGSM-style step: clamp01(img + epsilon * sign(d loss / d img)).
/// Labels are unchanged by construction.
std::vector<double> sat_perturb(const ToyDetector& det, std::span<const double> img,
                                const std::vector<Annotation>& gt, const SATConfig& cfg);

struct TrainConfig {
    int epochs = 60;
    int patience = 15;
    int batch_size = 8;
    double lr = 0.05;
    uint64_t seed = 0;
    double eval_conf = 0.05;  // decode threshold for per-epoch val mAP
    double eval_nms_iou = 0.45;
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_map50 = 0.0;
};

struct TrainResult {
    ToyDetector detector;              // best val-mAP parameters
    std::vector<double> final_params;  // parameters at the last completed step
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_map50 = 0.0;
    bool diverged = false;
};

/// Single-threaded, deterministic for a fixed seed. Each batch optionally
/// receives one SAT perturbation pass before the gradient step (two passes
/// per batch); training stops after `patience` epochs without val-mAP
/// improvement. A non-finite loss aborts with the last finite parameters.
TrainResult train(const std::vector<LabeledImage>& train_set,
                  const std::vector<LabeledImage>& val_set, ToyDetector det,
                  const TrainConfig& tcfg, const std::optional<SATConfig>& scfg);

/// Decoded, NMS-filtered detections for one image.
std::vector<Detection> detect(const ToyDetector& det, const LabeledImage& img,
                              double conf_thr, double nms_iou);

double eval_map50(const ToyDetector& det, const std::vector<LabeledImage>& images,
                  double conf_thr = 0.05, double nms_iou = 0.45);

std::string history_to_csv(const std::vector<EpochStats>& history);

}  // namespace dunedetect
