#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dunedetect/rng.hpp"
#include "dunedetect/sat.hpp"
#include "dunedetect/synthetic.hpp"
#include "helpers.hpp"

using namespace dunedetect;
using namespace dunedetect::testing;

namespace {

std::vector<double> random_plane(int side, Rng& rng) {
    std::vector<double> img(static_cast<size_t>(side) * side);
    for (auto& v : img) v = rng.uniform();
    return img;
}

std::vector<Annotation> random_gt(Rng& rng, int classes, int max_boxes = 3) {
    std::vector<Annotation> gt;
    const int n = 1 + static_cast<int>(rng.below(max_boxes));
    for (int i = 0; i < n; ++i)
        gt.push_back({static_cast<int>(rng.below(classes)), random_box(rng)});
    return gt;
}

ToyDetectorConfig small_cfg() {
    ToyDetectorConfig cfg;
    cfg.input_side = 16;
    cfg.grid = 4;
    cfg.classes = 2;
    cfg.hidden = {4, 6};
    return cfg;
}

/// convex instance: no hidden layers, one linear patchify conv
ToyDetectorConfig linear_cfg() {
    ToyDetectorConfig cfg;
    cfg.input_side = 16;
    cfg.grid = 4;
    cfg.classes = 2;
    cfg.hidden = {};
    return cfg;
}

}  // namespace

TEST_CASE("forward: zero parameters give objectness probability 0.5 everywhere") {
    ToyDetector det(small_cfg());  // zero-initialized
    Rng rng(1);
    const auto img = random_plane(16, rng);
    const auto preds = forward(det, img);
    for (int gy = 0; gy < 4; ++gy)
        for (int gx = 0; gx < 4; ++gx) {
            CHECK(preds.at(gx, gy, 0) == 0.0);  // logit 0 = probability 0.5
            CHECK(1.0 / (1.0 + std::exp(-preds.at(gx, gy, 0))) == doctest::Approx(0.5));
        }
}

TEST_CASE("forward: deterministic for a fixed seed and image") {
    const auto det = ToyDetector::random_init(small_cfg(), 5);
    const auto det2 = ToyDetector::random_init(small_cfg(), 5);
    CHECK(det.params() == det2.params());
    Rng rng(2);
    const auto img = random_plane(16, rng);
    CHECK(forward(det, img).data == forward(det2, img).data);
}

TEST_CASE("forward: shifting by one cell shifts interior objectness") {
    ToyDetectorConfig cfg;
    cfg.input_side = 32;
    cfg.grid = 8;
    cfg.classes = 2;
    cfg.hidden = {6, 8};
    const auto det = ToyDetector::random_init(cfg, 9);

    // bright blob centered in cell (3,3), then moved one cell (4 px) right
    auto blob_at = [&](int cx_px, int cy_px) {
        std::vector<double> img(32 * 32, 0.1);
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx)
                img[(cy_px + dy) * 32 + cx_px + dx] = 1.0;
        return img;
    };
    const auto a = forward(det, blob_at(14, 14));
    const auto b = forward(det, blob_at(18, 14));
    // interior cells (away from every border) shift exactly
    for (int gy = 2; gy <= 5; ++gy)
        for (int gx = 2; gx <= 4; ++gx)
            CHECK(a.at(gx, gy, 0) == doctest::Approx(b.at(gx + 1, gy, 0)).epsilon(1e-12));
}

TEST_CASE("loss: perfect predictions drive the loss towards zero") {
    ToyDetectorConfig cfg = small_cfg();
    const std::vector<Annotation> gt{{1, {0.55, 0.3, 0.25, 0.25}}};

    GridPred preds;
    preds.grid = cfg.grid;
    preds.classes = cfg.classes;
    preds.data.assign(static_cast<size_t>(cfg.grid) * cfg.grid * cfg.cell_attrs(), 0.0);
    const int gx = static_cast<int>(0.55 * 4), gy = static_cast<int>(0.3 * 4);
    const int A = cfg.cell_attrs();
    const double big = 30.0;  // saturates sigmoid/softmax
    for (int cy = 0; cy < 4; ++cy)
        for (int cx = 0; cx < 4; ++cx)
            preds.data[(cy * 4 + cx) * A + 0] = (cx == gx && cy == gy) ? big : -big;
    auto logit = [](double p) { return std::log(p / (1 - p)); };
    preds.data[(gy * 4 + gx) * A + 1] = logit(0.55 * 4 - gx);
    preds.data[(gy * 4 + gx) * A + 2] = logit(0.3 * 4 - gy);
    preds.data[(gy * 4 + gx) * A + 3] = std::log(0.25 * 4);
    preds.data[(gy * 4 + gx) * A + 4] = std::log(0.25 * 4);
    preds.data[(gy * 4 + gx) * A + 5 + 1] = big;  // class 1
    preds.data[(gy * 4 + gx) * A + 5 + 0] = -big;

    CHECK(loss_from_preds(preds, gt) < 1e-9);
}

TEST_CASE("loss: empty ground truth reduces to background BCE") {
    ToyDetector det(small_cfg());  // zero params -> all logits 0
    Rng rng(3);
    const auto img = random_plane(16, rng);
    const auto lg = detection_loss(det, img, {});
    // 0.5-weighted BCE(sigmoid(0), 0) averaged over negatives
    CHECK(lg.loss == doctest::Approx(0.5 * std::log(2.0)));
}

TEST_CASE("gradient check: analytic matches central finite differences") {
    Rng rng(42);
    const double h = 1e-5;
    int checked_params = 0, checked_inputs = 0;

    for (int trial = 0; trial < 12; ++trial) {
        const auto cfg = trial % 3 == 2 ? linear_cfg() : small_cfg();
        auto det = ToyDetector::random_init(cfg, rng.next_u64());
        const auto img = random_plane(cfg.input_side, rng);
        const auto gt = random_gt(rng, cfg.classes);
        const bool obj_only = trial % 4 == 3;
        const auto lg = detection_loss(det, img, gt, obj_only);

        // parameters: probe a spread of indices
        for (size_t p = 0; p < det.params().size(); p += det.params().size() / 25 + 1) {
            const double orig = det.params()[p];
            det.params()[p] = orig + h;
            double up, down;
            {
                const auto preds = forward(det, img);
                up = obj_only ? detection_loss(det, img, gt, true).loss
                              : loss_from_preds(preds, gt);
            }
            det.params()[p] = orig - h;
            {
                const auto preds = forward(det, img);
                down = obj_only ? detection_loss(det, img, gt, true).loss
                                : loss_from_preds(preds, gt);
            }
            det.params()[p] = orig;
            const double fd = (up - down) / (2 * h);
            const double scale = std::max({1.0, std::abs(fd), std::abs(lg.dparams[p])});
            CHECK(std::abs(lg.dparams[p] - fd) / scale < 1e-4);
            ++checked_params;
        }

        // input pixels
        auto mutable_img = img;
        for (size_t i = 0; i < img.size(); i += img.size() / 20 + 1) {
            const double orig = mutable_img[i];
            mutable_img[i] = orig + h;
            const double up = obj_only ? detection_loss(det, mutable_img, gt, true).loss
                                       : loss_from_preds(forward(det, mutable_img), gt);
            mutable_img[i] = orig - h;
            const double down = obj_only
                                    ? detection_loss(det, mutable_img, gt, true).loss
                                    : loss_from_preds(forward(det, mutable_img), gt);
            mutable_img[i] = orig;
            const double fd = (up - down) / (2 * h);
            const double scale = std::max({1.0, std::abs(fd), std::abs(lg.dinput[i])});
            CHECK(std::abs(lg.dinput[i] - fd) / scale < 1e-4);
            ++checked_inputs;
        }
    }
    CHECK(checked_params > 200);
    CHECK(checked_inputs > 200);
}

TEST_CASE("sat_perturb: epsilon 0 is the identity") {
    Rng rng(7);
    const auto det = ToyDetector::random_init(small_cfg(), 11);
    const auto img = random_plane(16, rng);
    SATConfig cfg;
    cfg.epsilon = 0.0;
    CHECK(sat_perturb(det, img, random_gt(rng, 2), cfg) == img);
}

TEST_CASE("sat_perturb: every changed pixel moves by exactly epsilon or clamps") {
    Rng rng(8);
    const auto det = ToyDetector::random_init(small_cfg(), 13);
    const auto img = random_plane(16, rng);
    SATConfig cfg;
    cfg.epsilon = 0.03;
    const auto out = sat_perturb(det, img, random_gt(rng, 2), cfg);
    REQUIRE(out.size() == img.size());
    for (size_t i = 0; i < img.size(); ++i) {
        const double d = out[i] - img[i];
        const bool unchanged = d == 0.0;
        const bool full_step = std::abs(std::abs(d) - cfg.epsilon) < 1e-15;
        const bool clamped = (out[i] == 0.0 || out[i] == 1.0) && std::abs(d) <= cfg.epsilon;
        CHECK((unchanged || full_step || clamped));
        CHECK(out[i] >= 0.0);
        CHECK(out[i] <= 1.0);
    }
}

TEST_CASE("sat_perturb: ascends a convex (linear) objectness loss") {
    Rng rng(9);
    int ascended = 0, active = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto det = ToyDetector::random_init(linear_cfg(), rng.next_u64());
        // keep pixels away from the clamp boundary so the full step applies
        std::vector<double> img(16 * 16);
        for (auto& v : img) v = rng.uniform(0.2, 0.8);
        const auto gt = random_gt(rng, 2);
        SATConfig cfg;
        cfg.epsilon = 0.05;
        cfg.mode = SATMode::objectness_hide;  // pure BCE of a linear map: convex

        const double before = detection_loss(det, img, gt, true).loss;
        const auto perturbed = sat_perturb(det, img, gt, cfg);
        const double after = detection_loss(det, perturbed, gt, true).loss;
        if (perturbed != img) {
            ++active;
            CHECK(after >= before - 1e-12);
            ascended += after > before ? 1 : 0;
        }
    }
    CHECK(active > 90);
    CHECK(ascended == active);  // strict increase whenever the gradient is nonzero
}

namespace {

std::vector<LabeledImage> tiny_dataset(int n, uint64_t seed) {
    return make_synthetic_shapes(n, 32, 3, seed);
}

TrainConfig fast_train_cfg(int epochs = 3) {
    TrainConfig t;
    t.epochs = epochs;
    t.patience = epochs;
    t.batch_size = 8;
    t.lr = 0.05;
    t.seed = 123;
    return t;
}

ToyDetectorConfig train_net_cfg() {
    ToyDetectorConfig cfg;
    cfg.input_side = 32;
    cfg.grid = 8;
    cfg.classes = 3;
    cfg.hidden = {8, 16};
    return cfg;
}

}  // namespace

TEST_CASE("train: SAT with apply_prob 0 or eps 0 matches plain training exactly") {
    const auto train_set = tiny_dataset(40, 1);
    const auto val_set = tiny_dataset(10, 2);
    const auto init = ToyDetector::random_init(train_net_cfg(), 77);
    const auto tcfg = fast_train_cfg();

    const auto plain = train(train_set, val_set, init, tcfg, std::nullopt);

    SATConfig prob0;
    prob0.epsilon = 0.05;
    prob0.apply_prob = 0.0;
    const auto sat_a = train(train_set, val_set, init, tcfg, prob0);

    SATConfig eps0;
    eps0.epsilon = 0.0;
    eps0.apply_prob = 0.7;
    const auto sat_b = train(train_set, val_set, init, tcfg, eps0);

    CHECK(plain.final_params == sat_a.final_params);
    CHECK(plain.final_params == sat_b.final_params);
    REQUIRE(plain.history.size() == sat_a.history.size());
    for (size_t i = 0; i < plain.history.size(); ++i) {
        CHECK(plain.history[i].train_loss == sat_a.history[i].train_loss);
        CHECK(plain.history[i].train_loss == sat_b.history[i].train_loss);
        CHECK(plain.history[i].val_map50 == sat_b.history[i].val_map50);
    }
}

TEST_CASE("train: identical seeds give identical histories to full precision") {
    const auto train_set = tiny_dataset(40, 3);
    const auto val_set = tiny_dataset(10, 4);
    const auto init = ToyDetector::random_init(train_net_cfg(), 5);
    const auto tcfg = fast_train_cfg();
    SATConfig scfg;

    const auto a = train(train_set, val_set, init, tcfg, scfg);
    const auto b = train(train_set, val_set, init, tcfg, scfg);
    CHECK(a.final_params == b.final_params);
    REQUIRE(a.history.size() == b.history.size());
    for (size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].train_loss == b.history[i].train_loss);
        CHECK(a.history[i].val_map50 == b.history[i].val_map50);
    }
}

TEST_CASE("train: patience stops exactly patience epochs after the best") {
    const auto train_set = tiny_dataset(24, 5);
    const auto val_set = tiny_dataset(8, 6);
    const auto init = ToyDetector::random_init(train_net_cfg(), 7);
    TrainConfig tcfg = fast_train_cfg(40);
    tcfg.patience = 4;
    tcfg.lr = 0.0;  // nothing improves, best stays at epoch 1

    const auto res = train(train_set, val_set, init, tcfg, std::nullopt);
    CHECK(res.best_epoch == 1);
    CHECK(res.history.size() == 5);  // stopped at epoch 1 + 4
}

TEST_CASE("train: divergence aborts with the last finite parameters") {
    const auto train_set = tiny_dataset(24, 8);
    const auto val_set = tiny_dataset(8, 9);
    const auto init = ToyDetector::random_init(train_net_cfg(), 10);
    TrainConfig tcfg = fast_train_cfg(10);
    tcfg.lr = 1e18;  // guaranteed blow-up

    const auto res = train(train_set, val_set, init, tcfg, std::nullopt);
    CHECK(res.diverged);
    for (double v : res.final_params) CHECK(std::isfinite(v));
    for (double v : res.detector.params()) CHECK(std::isfinite(v));
}

TEST_CASE("checkpoint save/load round-trip") {
    TmpDir tmp("ckpt");
    const auto det = ToyDetector::random_init(train_net_cfg(), 21);
    const auto file = tmp.path / "det.ckpt";
    det.save(file);
    const auto back = ToyDetector::load(file);
    CHECK(back.params() == det.params());
    CHECK(back.config().grid == det.config().grid);
    CHECK(back.config().hidden == det.config().hidden);
    CHECK(back.layout().size() == det.layout().size());

    Rng rng(22);
    const auto img = random_plane(32, rng);
    CHECK(forward(det, img).data == forward(back, img).data);
}

TEST_CASE("history CSV has the documented header") {
    const std::vector<EpochStats> h{{1, 0.5, 0.25}, {2, 0.25, 0.5}};
    const auto csv = history_to_csv(h);
    CHECK(csv.rfind("epoch,train_loss,val_map50\n", 0) == 0);
    CHECK(csv.find("\n1,0.5,0.25\n") != std::string::npos);
}

TEST_CASE("make_synthetic_shapes: n=0 gives an empty dataset") {
    CHECK(make_synthetic_shapes(0, 32, 3, 1).empty());
    CHECK_THROWS_AS(make_synthetic_shapes(5, 8, 3, 1), ValidationError);
    CHECK_THROWS_AS(make_synthetic_shapes(5, 32, 9, 1), ValidationError);
}

TEST_CASE("make_synthetic_shapes: boxes tightly bound bright pixels (oracle)") {
    const auto images = make_synthetic_shapes(60, 32, 3, 99);
    for (const auto& img : images) {
        img.validate(3);
        // bright mask from the raster alone
        std::vector<char> bright(32 * 32, 0);
        for (int i = 0; i < 32 * 32; ++i) bright[i] = img.pixels[i * 3] >= kShapeThreshold;

        for (const auto& a : img.annotations) {
            const int x0 = static_cast<int>(std::lround(a.box.x0() * 32));
            const int x1 = static_cast<int>(std::lround(a.box.x1() * 32)) - 1;
            const int y0 = static_cast<int>(std::lround(a.box.y0() * 32));
            const int y1 = static_cast<int>(std::lround(a.box.y1() * 32)) - 1;
            bool touch_left = false, touch_right = false, touch_top = false,
                 touch_bottom = false;
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    if (!bright[y * 32 + x]) continue;
                    touch_left |= x == x0;
                    touch_right |= x == x1;
                    touch_top |= y == y0;
                    touch_bottom |= y == y1;
                }
            CHECK(touch_left);
            CHECK(touch_right);
            CHECK(touch_top);
            CHECK(touch_bottom);
        }
        // no bright pixel outside all boxes
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                if (!bright[y * 32 + x]) continue;
                const double cx = (x + 0.5) / 32.0, cy = (y + 0.5) / 32.0;
                bool inside = false;
                for (const auto& a : img.annotations)
                    inside |= cx >= a.box.x0() && cx <= a.box.x1() && cy >= a.box.y0() &&
                              cy <= a.box.y1();
                CHECK(inside);
            }
    }
}

TEST_CASE("make_synthetic_shapes: deterministic and roughly class-uniform") {
    const auto a = make_synthetic_shapes(30, 32, 3, 7);
    const auto b = make_synthetic_shapes(30, 32, 3, 7);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].pixels == b[i].pixels);
        CHECK(a[i].annotations == b[i].annotations);
    }

    const auto big = make_synthetic_shapes(1200, 32, 3, 11);
    std::array<size_t, 3> counts{};
    size_t total = 0;
    for (const auto& img : big)
        for (const auto& ann : img.annotations) {
            ++counts[ann.class_id];
            ++total;
        }
    REQUIRE(total >= 1000);
    for (int c = 0; c < 3; ++c) {
        const double share = static_cast<double>(counts[c]) / static_cast<double>(total);
        CHECK(std::abs(share - 1.0 / 3.0) < 0.05);
    }
}

TEST_CASE("detect: produces NMS-filtered detections on a trained-ish model") {
    const auto data = tiny_dataset(60, 31);
    const std::vector<LabeledImage> train_set(data.begin(), data.begin() + 48);
    const std::vector<LabeledImage> val_set(data.begin() + 48, data.end());
    auto res = train(train_set, val_set, ToyDetector::random_init(train_net_cfg(), 3),
                     fast_train_cfg(8), std::nullopt);
    const auto dets = detect(res.detector, val_set[0], 0.05, 0.45);
    for (const auto& d : dets) {
        CHECK(d.score >= 0.05);
        CHECK(d.box.inside_unit());
        CHECK(d.image_id == val_set[0].id);
    }
    const double m = eval_map50(res.detector, val_set);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
}
