#include "dunedetect/sat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dunedetect/rng.hpp"

namespace dunedetect {

namespace {

using nlohmann::json;

// loss term weights; positive-cell terms are averaged over positives and the
// background BCE over negatives, so the balance is grid-size independent
constexpr double kObjPosWeight = 1.0;
constexpr double kNoObjWeight = 0.5;
constexpr double kBoxWeight = 1.0;
constexpr double kClsWeight = 1.0;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// BCE from the logit, numerically stable
double bce_logit(double logit, double target) {
    return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

struct ConvDef {
    int in_ch, out_ch, k, stride, pad;
    int in_hw, out_hw;
    size_t w_off, b_off;
    bool tanh_act;
};

std::vector<ConvDef> build_defs(const ToyDetectorConfig& cfg) {
    std::vector<ConvDef> defs;
    size_t off = 0;
    int ch = 1, hw = cfg.input_side;
    for (int hc : cfg.hidden) {
        // 5x5 stride-2 convs keep the head's receptive field wider than the
        // largest synthetic shape
        ConvDef d{ch, hc, 5, 2, 2, hw, (hw - 1) / 2 + 1, 0, 0, true};
        d.w_off = off;
        off += static_cast<size_t>(d.out_ch) * d.in_ch * d.k * d.k;
        d.b_off = off;
        off += static_cast<size_t>(d.out_ch);
        defs.push_back(d);
        ch = hc;
        hw = d.out_hw;
    }
    // head: 1x1 on features, or one linear patchify conv when there are no
    // hidden layers (the convex instance)
    const int k = cfg.hidden.empty() ? cfg.input_side / cfg.grid : 1;
    ConvDef head{ch, cfg.cell_attrs(), k, k, 0, hw, cfg.grid, 0, 0, false};
    if (!cfg.hidden.empty()) {
        head.stride = 1;
        head.k = 1;
    }
    head.w_off = off;
    off += static_cast<size_t>(head.out_ch) * head.in_ch * head.k * head.k;
    head.b_off = off;
    defs.push_back(head);
    return defs;
}

size_t param_count(const std::vector<ConvDef>& defs) {
    const ConvDef& last = defs.back();
    return last.b_off + static_cast<size_t>(last.out_ch);
}

void conv_forward(const double* in, const double* params, const ConvDef& d, double* out) {
    const double* w = params + d.w_off;
    const double* b = params + d.b_off;
    const int H = d.in_hw, O = d.out_hw, k = d.k;
    for (int co = 0; co < d.out_ch; ++co) {
        for (int oy = 0; oy < O; ++oy) {
            for (int ox = 0; ox < O; ++ox) {
                double acc = b[co];
                for (int ci = 0; ci < d.in_ch; ++ci) {
                    const double* ip = in + static_cast<size_t>(ci) * H * H;
                    const double* wp = w + (static_cast<size_t>(co) * d.in_ch + ci) * k * k;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * d.stride + ky - d.pad;
                        if (iy < 0 || iy >= H) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * d.stride + kx - d.pad;
                            if (ix < 0 || ix >= H) continue;
                            acc += ip[static_cast<size_t>(iy) * H + ix] * wp[ky * k + kx];
                        }
                    }
                }
                out[(static_cast<size_t>(co) * O + oy) * O + ox] = acc;
            }
        }
    }
}

/// accumulates into dparams/din; `in` is the layer input that produced dout
void conv_backward(const double* in, const double* params, const ConvDef& d,
                   const double* dout, double* dparams, double* din) {
    const double* w = params + d.w_off;
    double* dw = dparams + d.w_off;
    double* db = dparams + d.b_off;
    const int H = d.in_hw, O = d.out_hw, k = d.k;
    for (int co = 0; co < d.out_ch; ++co) {
        for (int oy = 0; oy < O; ++oy) {
            for (int ox = 0; ox < O; ++ox) {
                const double g = dout[(static_cast<size_t>(co) * O + oy) * O + ox];
                if (g == 0.0) continue;
                db[co] += g;
                for (int ci = 0; ci < d.in_ch; ++ci) {
                    const double* ip = in + static_cast<size_t>(ci) * H * H;
                    double* dip = din ? din + static_cast<size_t>(ci) * H * H : nullptr;
                    const size_t wbase = (static_cast<size_t>(co) * d.in_ch + ci) * k * k;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * d.stride + ky - d.pad;
                        if (iy < 0 || iy >= H) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * d.stride + kx - d.pad;
                            if (ix < 0 || ix >= H) continue;
                            const size_t ii = static_cast<size_t>(iy) * H + ix;
                            dw[wbase + ky * k + kx] += g * ip[ii];
                            if (dip) dip[ii] += g * w[wbase + ky * k + kx];
                        }
                    }
                }
            }
        }
    }
}

/// activations per layer; acts[0] is the input plane
std::vector<std::vector<double>> forward_planar(const ToyDetector& det,
                                                std::span<const double> img) {
    const auto& cfg = det.config();
    if (img.size() != static_cast<size_t>(cfg.input_side) * cfg.input_side)
        throw ValidationError("input raster does not match detector input side");
    const auto defs = build_defs(cfg);
    std::vector<std::vector<double>> acts;
    acts.emplace_back(img.begin(), img.end());
    for (const auto& d : defs) {
        std::vector<double> out(static_cast<size_t>(d.out_ch) * d.out_hw * d.out_hw);
        conv_forward(acts.back().data(), det.params().data(), d, out.data());
        if (d.tanh_act)
            for (auto& v : out) v = std::tanh(v);
        acts.push_back(std::move(out));
    }
    return acts;
}

GridPred planar_to_grid(const std::vector<double>& planar, int grid, int classes) {
    GridPred p;
    p.grid = grid;
    p.classes = classes;
    const int A = 5 + classes;
    p.data.resize(static_cast<size_t>(grid) * grid * A);
    for (int a = 0; a < A; ++a)
        for (int gy = 0; gy < grid; ++gy)
            for (int gx = 0; gx < grid; ++gx)
                p.data[(static_cast<size_t>(gy) * grid + gx) * A + a] =
                    planar[(static_cast<size_t>(a) * grid + gy) * grid + gx];
    return p;
}

struct CellTarget {
    bool pos = false;
    double ox = 0, oy = 0, tw = 0, th = 0;
    int cls = 0;
};

/// center-cell assignment; the first annotation claims a contested cell
std::vector<CellTarget> build_targets(const std::vector<Annotation>& gt, int grid) {
    std::vector<CellTarget> cells(static_cast<size_t>(grid) * grid);
    for (const auto& a : gt) {
        const int gx = std::min(grid - 1, static_cast<int>(std::floor(a.box.cx * grid)));
        const int gy = std::min(grid - 1, static_cast<int>(std::floor(a.box.cy * grid)));
        CellTarget& c = cells[static_cast<size_t>(gy) * grid + gx];
        if (c.pos) continue;
        c.pos = true;
        c.ox = a.box.cx * grid - gx;
        c.oy = a.box.cy * grid - gy;
        c.tw = std::log(a.box.w * grid);
        c.th = std::log(a.box.h * grid);
        c.cls = a.class_id;
    }
    return cells;
}

/// shared loss kernel; fills dpred (per-cell layout) when non-null
double loss_and_dpred(const GridPred& preds, const std::vector<Annotation>& gt,
                      bool objectness_only, std::vector<double>* dpred) {
    const int G = preds.grid, C = preds.classes, A = 5 + C;
    const auto targets = build_targets(gt, G);
    int n_pos = 0;
    for (const auto& t : targets) n_pos += t.pos ? 1 : 0;
    const int n_neg = G * G - n_pos;
    const double pos_norm = 1.0 / std::max(1, n_pos);
    const double neg_norm = 1.0 / std::max(1, n_neg);

    if (dpred) dpred->assign(preds.data.size(), 0.0);
    double loss = 0.0;
    std::vector<double> probs(static_cast<size_t>(C));

    for (int gy = 0; gy < G; ++gy) {
        for (int gx = 0; gx < G; ++gx) {
            const size_t base = (static_cast<size_t>(gy) * G + gx) * A;
            const CellTarget& t = targets[static_cast<size_t>(gy) * G + gx];
            const double o = preds.data[base + 0];
            const double ow =
                t.pos ? kObjPosWeight * pos_norm : kNoObjWeight * neg_norm;
            loss += ow * bce_logit(o, t.pos ? 1.0 : 0.0);
            if (dpred) (*dpred)[base + 0] = ow * (sigmoid(o) - (t.pos ? 1.0 : 0.0));
            if (!t.pos || objectness_only) continue;

            // box offsets: sigmoid for the center, raw logs for the size
            const double sx = sigmoid(preds.data[base + 1]);
            const double sy = sigmoid(preds.data[base + 2]);
            const double tw = preds.data[base + 3];
            const double th = preds.data[base + 4];
            loss += kBoxWeight * pos_norm *
                    ((sx - t.ox) * (sx - t.ox) + (sy - t.oy) * (sy - t.oy) +
                     (tw - t.tw) * (tw - t.tw) + (th - t.th) * (th - t.th));
            if (dpred) {
                (*dpred)[base + 1] = kBoxWeight * pos_norm * 2.0 * (sx - t.ox) * sx * (1 - sx);
                (*dpred)[base + 2] = kBoxWeight * pos_norm * 2.0 * (sy - t.oy) * sy * (1 - sy);
                (*dpred)[base + 3] = kBoxWeight * pos_norm * 2.0 * (tw - t.tw);
                (*dpred)[base + 4] = kBoxWeight * pos_norm * 2.0 * (th - t.th);
            }

            // class cross-entropy with a stable softmax
            double mx = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < C; ++c) mx = std::max(mx, preds.data[base + 5 + c]);
            double denom = 0.0;
            for (int c = 0; c < C; ++c) {
                probs[c] = std::exp(preds.data[base + 5 + c] - mx);
                denom += probs[c];
            }
            for (int c = 0; c < C; ++c) probs[c] /= denom;
            loss += kClsWeight * pos_norm * (-std::log(std::max(probs[t.cls], 1e-300)));
            if (dpred)
                for (int c = 0; c < C; ++c)
                    (*dpred)[base + 5 + c] =
                        kClsWeight * pos_norm * (probs[c] - (c == t.cls ? 1.0 : 0.0));
        }
    }
    return loss;
}

void store_le_doubles(std::ofstream& out, const std::vector<double>& v) {
    for (double d : v) {
        const uint64_t bits = std::bit_cast<uint64_t>(d);
        uint8_t bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<uint8_t>((bits >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

std::vector<double> load_le_doubles(std::ifstream& in, size_t n) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) {
        uint8_t bytes[8];
        in.read(reinterpret_cast<char*>(bytes), 8);
        if (!in) throw IoError("checkpoint truncated");
        uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<uint64_t>(bytes[b]) << (8 * b);
        v[i] = std::bit_cast<double>(bits);
    }
    return v;
}

}  // namespace

void ToyDetectorConfig::validate() const {
    if (input_side < 8) throw ValidationError("detector input side must be >= 8");
    if (grid < 1) throw ValidationError("detector grid must be >= 1");
    if (classes < 1) throw ValidationError("detector needs at least one class");
    for (int h : hidden)
        if (h < 1) throw ValidationError("hidden channel counts must be >= 1");
    if (hidden.empty()) {
        if (input_side % grid != 0)
            throw ValidationError("input side must be a multiple of the grid");
    } else {
        if (grid << hidden.size() != input_side)
            throw ValidationError("input side must equal grid * 2^hidden_layers");
    }
}

ToyDetector::ToyDetector(ToyDetectorConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const auto defs = build_defs(cfg_);
    for (size_t i = 0; i < defs.size(); ++i) {
        const auto& d = defs[i];
        const std::string base =
            i + 1 == defs.size() ? "head" : "conv" + std::to_string(i);
        layout_.push_back({base + ".weight",
                           {d.out_ch, d.in_ch, d.k, d.k},
                           d.w_off,
                           static_cast<size_t>(d.out_ch) * d.in_ch * d.k * d.k});
        layout_.push_back({base + ".bias", {d.out_ch}, d.b_off, static_cast<size_t>(d.out_ch)});
    }
    params_.assign(param_count(defs), 0.0);
}

ToyDetector ToyDetector::random_init(const ToyDetectorConfig& cfg, uint64_t seed) {
    ToyDetector det(cfg);
    const auto defs = build_defs(det.cfg_);
    Rng rng(derive_seed(seed, "init"));
    for (const auto& d : defs) {
        const double fan_in = static_cast<double>(d.in_ch) * d.k * d.k;
        const double fan_out = static_cast<double>(d.out_ch) * d.k * d.k;
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        const size_t n = static_cast<size_t>(d.out_ch) * d.in_ch * d.k * d.k;
        for (size_t i = 0; i < n; ++i) det.params_[d.w_off + i] = rng.uniform(-a, a);
    }
    // start objectness pessimistic so early training is not flooded with
    // false positives
    det.params_[defs.back().b_off] = -2.0;
    return det;
}

std::vector<double> to_gray(const LabeledImage& img) {
    std::vector<double> out(static_cast<size_t>(img.width_px) * img.height_px);
    for (size_t i = 0; i < out.size(); ++i) {
        const uint8_t* p = img.pixels.data() + i * 3;
        out[i] = (p[0] + p[1] + p[2]) / (3.0 * 255.0);
    }
    return out;
}

GridPred forward(const ToyDetector& det, std::span<const double> img) {
    const auto acts = forward_planar(det, img);
    return planar_to_grid(acts.back(), det.config().grid, det.config().classes);
}

double loss_from_preds(const GridPred& preds, const std::vector<Annotation>& gt) {
    return loss_and_dpred(preds, gt, false, nullptr);
}

LossGrads detection_loss(const ToyDetector& det, std::span<const double> img,
                         const std::vector<Annotation>& gt, bool objectness_only) {
    const auto& cfg = det.config();
    const auto defs = build_defs(cfg);
    const auto acts = forward_planar(det, img);
    const GridPred preds = planar_to_grid(acts.back(), cfg.grid, cfg.classes);

    LossGrads out;
    std::vector<double> dpred;
    out.loss = loss_and_dpred(preds, gt, objectness_only, &dpred);
    out.dparams.assign(det.params().size(), 0.0);

    // per-cell gradient back to the planar head output
    const int G = cfg.grid, A = cfg.cell_attrs();
    std::vector<double> dout(static_cast<size_t>(A) * G * G);
    for (int a = 0; a < A; ++a)
        for (int gy = 0; gy < G; ++gy)
            for (int gx = 0; gx < G; ++gx)
                dout[(static_cast<size_t>(a) * G + gy) * G + gx] =
                    dpred[(static_cast<size_t>(gy) * G + gx) * A + a];

    for (size_t li = defs.size(); li-- > 0;) {
        const auto& d = defs[li];
        if (d.tanh_act) {
            const auto& act = acts[li + 1];
            for (size_t i = 0; i < dout.size(); ++i) dout[i] *= 1.0 - act[i] * act[i];
        }
        std::vector<double> din(acts[li].size(), 0.0);
        conv_backward(acts[li].data(), det.params().data(), d, dout.data(),
                      out.dparams.data(), din.data());
        dout = std::move(din);
    }
    out.dinput = std::move(dout);
    return out;
}

std::vector<double> sat_perturb(const ToyDetector& det, std::span<const double> img,
                                const std::vector<Annotation>& gt, const SATConfig& cfg) {
    if (cfg.epsilon < 0) throw ValidationError("sat epsilon must be >= 0");
    const auto grads =
        detection_loss(det, img, gt, cfg.mode == SATMode::objectness_hide);
    std::vector<double> out(img.begin(), img.end());
    for (size_t i = 0; i < out.size(); ++i) {
        const double g = grads.dinput[i];
        const double step = g > 0 ? cfg.epsilon : (g < 0 ? -cfg.epsilon : 0.0);
        out[i] = std::clamp(out[i] + step, 0.0, 1.0);
    }
    return out;
}

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

TrainResult train(const std::vector<LabeledImage>& train_set,
                  const std::vector<LabeledImage>& val_set, ToyDetector det,
                  const TrainConfig& tcfg, const std::optional<SATConfig>& scfg) {
    if (train_set.empty() || val_set.empty())
        throw ValidationError("train: empty train or val set");
    if (tcfg.batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
    if (tcfg.epochs < 1) throw ValidationError("train: epochs must be >= 1");
    if (tcfg.patience < 1 || tcfg.patience > tcfg.epochs)
        throw ValidationError("train: patience must be in [1, epochs]");
    if (scfg && !(scfg->apply_prob >= 0.0 && scfg->apply_prob <= 1.0))
        throw ValidationError("train: sat apply_prob must be in [0,1]");

    const int S = det.config().input_side;
    std::vector<std::vector<double>> gray;
    gray.reserve(train_set.size());
    for (const auto& img : train_set) {
        if (img.width_px != S || img.height_px != S)
            throw ValidationError("train image '" + img.id + "' does not match input side");
        gray.push_back(to_gray(img));
    }

    Rng rng_data(derive_seed(tcfg.seed, "train-data"));
    // separate stream so apply_prob=0 leaves the data order untouched
    Rng rng_sat(derive_seed(tcfg.seed, "train-sat"));

    TrainResult res{std::move(det), {}, {}, 0, -1.0, false};
    std::vector<double> grad(res.detector.params().size());
    std::vector<double> prev(res.detector.params().size());
    std::vector<double> best_params = res.detector.params();

    std::vector<size_t> order(train_set.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= tcfg.epochs && !res.diverged; ++epoch) {
        rng_data.shuffle(order);
        double loss_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += tcfg.batch_size) {
            const size_t end = std::min(order.size(), start + tcfg.batch_size);
            const bool apply_sat = scfg && rng_sat.coin(scfg->apply_prob);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (size_t bi = start; bi < end; ++bi) {
                const size_t i = order[bi];
                const auto& anns = train_set[i].annotations;
                std::vector<double> x = gray[i];
                if (apply_sat) x = sat_perturb(res.detector, x, anns, *scfg);
                const auto lg = detection_loss(res.detector, x, anns);
                batch_loss += lg.loss;
                for (size_t p = 0; p < grad.size(); ++p) grad[p] += lg.dparams[p];
            }
            const double bn = static_cast<double>(end - start);
            loss_sum += batch_loss;

            prev = res.detector.params();
            auto& params = res.detector.params();
            for (size_t p = 0; p < params.size(); ++p)
                params[p] -= tcfg.lr * grad[p] / bn;

            if (!std::isfinite(batch_loss) || !all_finite(params)) {
                params = prev;  // last finite checkpoint
                res.diverged = true;
                break;
            }
        }
        if (res.diverged) break;

        const double train_loss = loss_sum / static_cast<double>(train_set.size());
        const double map50 =
            eval_map50(res.detector, val_set, tcfg.eval_conf, tcfg.eval_nms_iou);
        res.history.push_back({epoch, train_loss, map50});

        if (map50 > res.best_map50) {
            res.best_map50 = map50;
            res.best_epoch = epoch;
            best_params = res.detector.params();
        } else if (epoch - res.best_epoch >= tcfg.patience) {
            break;
        }
    }

    res.final_params = res.detector.params();
    res.detector.params() = best_params;
    return res;
}

std::vector<Detection> detect(const ToyDetector& det, const LabeledImage& img,
                              double conf_thr, double nms_iou) {
    const auto gray = to_gray(img);
    const GridPred preds = forward(det, gray);
    const int G = preds.grid, C = preds.classes;

    std::vector<Detection> dets;
    for (int gy = 0; gy < G; ++gy) {
        for (int gx = 0; gx < G; ++gx) {
            const double obj = sigmoid(preds.at(gx, gy, 0));
            double mx = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < C; ++c) mx = std::max(mx, preds.at(gx, gy, 5 + c));
            double denom = 0.0;
            std::vector<double> probs(static_cast<size_t>(C));
            for (int c = 0; c < C; ++c) {
                probs[c] = std::exp(preds.at(gx, gy, 5 + c) - mx);
                denom += probs[c];
            }
            int best_c = 0;
            for (int c = 1; c < C; ++c)
                if (probs[c] > probs[best_c]) best_c = c;
            const double score = obj * probs[best_c] / denom;
            if (score < conf_thr) continue;

            const double cx = (gx + sigmoid(preds.at(gx, gy, 1))) / G;
            const double cy = (gy + sigmoid(preds.at(gx, gy, 2))) / G;
            const double w = std::exp(preds.at(gx, gy, 3)) / G;
            const double h = std::exp(preds.at(gx, gy, 4)) / G;
            const double x0 = std::clamp(cx - w / 2, 0.0, 1.0);
            const double y0 = std::clamp(cy - h / 2, 0.0, 1.0);
            const double x1 = std::clamp(cx + w / 2, 0.0, 1.0);
            const double y1 = std::clamp(cy + h / 2, 0.0, 1.0);
            if (x1 <= x0 || y1 <= y0) continue;
            dets.push_back({img.id, best_c, score, NormBox::from_corners(x0, y0, x1, y1)});
        }
    }
    if (dets.empty()) return dets;
    return nms(dets, nms_iou);
}

double eval_map50(const ToyDetector& det, const std::vector<LabeledImage>& images,
                  double conf_thr, double nms_iou) {
    GroundTruth gt;
    gt.class_count = det.config().classes;
    std::vector<Detection> dets;
    for (const auto& img : images) {
        gt.images[img.id] = img.annotations;
        auto d = detect(det, img, conf_thr, nms_iou);
        dets.insert(dets.end(), d.begin(), d.end());
    }
    EvalConfig cfg;
    cfg.iou_thresholds = {0.5};
    return evaluate(gt, dets, cfg).map50;
}

std::string history_to_csv(const std::vector<EpochStats>& history) {
    std::string out = "epoch,train_loss,val_map50\n";
    char buf[128];
    for (const auto& e : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", e.epoch, e.train_loss,
                      e.val_map50);
        out += buf;
    }
    return out;
}

void ToyDetector::save(const std::filesystem::path& file) const {
    json j;
    j["format"] = "dunedetect-toydet";
    j["version"] = 1;
    j["config"] = {{"input_side", cfg_.input_side},
                   {"grid", cfg_.grid},
                   {"classes", cfg_.classes},
                   {"hidden", cfg_.hidden}};
    j["dtype"] = "float64le";
    j["param_count"] = params_.size();
    json layout = json::array();
    for (const auto& e : layout_)
        layout.push_back({{"name", e.name}, {"shape", e.shape}, {"offset", e.offset}});
    j["layout"] = layout;

    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << j.dump() << "\n";
    store_le_doubles(out, params_);
    if (!out) throw IoError("write failed for " + file.string());
}

ToyDetector ToyDetector::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::string header;
    if (!std::getline(in, header)) throw IoError("checkpoint missing header");
    json j;
    try {
        j = json::parse(header);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("checkpoint header: ") + e.what());
    }
    if (j.value("format", "") != "dunedetect-toydet")
        throw ValidationError("not a detector checkpoint: " + file.string());

    ToyDetectorConfig cfg;
    cfg.input_side = j["config"]["input_side"];
    cfg.grid = j["config"]["grid"];
    cfg.classes = j["config"]["classes"];
    cfg.hidden = j["config"]["hidden"].get<std::vector<int>>();
    ToyDetector det(cfg);
    const size_t n = j["param_count"];
    if (n != det.params_.size())
        throw ValidationError("checkpoint parameter count does not match its config");
    det.params_ = load_le_doubles(in, n);
    return det;
}

}  // namespace dunedetect
