#include "dunedetect/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dunedetect/augment.hpp"
#include "dunedetect/bench.hpp"
#include "dunedetect/budget.hpp"
#include "dunedetect/dataset.hpp"
#include "dunedetect/eval.hpp"
#include "dunedetect/image_io.hpp"
#include "dunedetect/report.hpp"
#include "dunedetect/sat.hpp"
#include "dunedetect/synthetic.hpp"
#include "dunedetect/version.hpp"

namespace dunedetect {

namespace {

using nlohmann::json;

uint64_t env_seed() {
    const char* v = std::getenv("DUNE_DETECT_SEED");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const unsigned long long s = std::strtoull(v, &end, 10);
    if (end && *end != '\0')
        throw InputError("DUNE_DETECT_SEED must be a non-negative integer");
    return s;
}

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    if (file.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << text;
    if (!out) throw IoError("write failed for " + file.string());
}

/// timestamps live in a sidecar so primary reports stay byte-reproducible
void write_sidecar(const std::filesystem::path& primary) {
    const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    json j;
    j["written_at_unix_ms"] = now;
    j["tool_version"] = kVersion;
    write_text(primary.string() + ".meta.json", j.dump(2) + "\n");
}

json repro_stanza(const std::vector<std::string>& args, uint64_t seed) {
    // output locations are not part of the run's semantics
    static const std::set<std::string> kOutputFlags{"--out", "--history", "--report",
                                                    "--sweep"};
    std::string canon;
    for (size_t i = 0; i < args.size(); ++i) {
        if (kOutputFlags.count(args[i])) {
            ++i;
            continue;
        }
        canon += args[i];
        canon += '\0';
    }
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    json j;
    j["seed"] = seed;
    j["version"] = kVersion;
    j["config_hash"] = hex;
    return j;
}

std::string with_repro(const std::string& body, const json& stanza) {
    json j = json::parse(body);
    j["repro"] = stanza;
    return j.dump(2) + "\n";
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text(out_path, text);
        write_sidecar(out_path);
    }
}

/// a plain directory of PNGs (negatives), each with an empty label set
std::vector<LabeledImage> read_image_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw InputError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<LabeledImage> out;
    for (const auto& f : files) {
        LabeledImage img;
        img.id = f.stem().string();
        read_png_rgb8(f, img.width_px, img.height_px, img.pixels);
        img.provenance = Provenance::negative;
        out.push_back(std::move(img));
    }
    return out;
}

std::array<double, 3> parse_ratio(const std::string& s) {
    std::array<double, 3> r{};
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &r[0], &r[1], &r[2]) != 3)
        throw InputError("ratio must be three comma-separated fractions, e.g. 0.6,0.2,0.2");
    return r;
}

std::vector<double> parse_iou_range(const std::string& s) {
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) == 3) {
        if (step <= 0 || hi < lo) throw InputError("bad --iou-range");
        std::vector<double> out;
        for (double t = lo; t <= hi + 1e-9; t += step) out.push_back(t);
        return out;
    }
    char* end = nullptr;
    const double single = std::strtod(s.c_str(), &end);
    if (end && *end == '\0') return {single};
    throw InputError("bad --iou-range '" + s + "', expected lo:hi:step or a single value");
}

struct GlobalOpts {
    uint64_t seed = 0;
    int threads = 1;
    std::string out_format = "json";
    std::vector<std::string> args;  // full argv tail, for the config hash
};

int cmd_ingest(const GlobalOpts& g, const std::string& data, const std::string& out) {
    LoadedDataset ds = read_dataset(data);
    for (const auto& img : ds.images) img.validate(ds.desc.class_count());
    DatasetManifest m = summarize(ds.images, ds.split, ds.desc);
    emit(with_repro(m.to_json_string(), repro_stanza(g.args, g.seed)), out);
    return 0;
}

int cmd_split(const GlobalOpts& g, const std::string& ids_file, long count,
              const std::string& ratio_str, const std::string& out) {
    std::vector<std::string> ids;
    if (!ids_file.empty()) {
        std::istringstream ss(read_text(ids_file));
        std::string line;
        while (std::getline(ss, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (!line.empty()) ids.push_back(line);
        }
    } else if (count > 0) {
        char buf[32];
        for (long i = 0; i < count; ++i) {
            std::snprintf(buf, sizeof(buf), "img-%06ld", i);
            ids.push_back(buf);
        }
    } else {
        throw InputError("split needs --ids <file> or --count N");
    }

    const DatasetSplit split = split_dataset(ids, parse_ratio(ratio_str), g.seed);
    json j;
    j["sizes"] = {{"train", split.train.size()},
                  {"val", split.val.size()},
                  {"test", split.test.size()}};
    j["train"] = split.train;
    j["val"] = split.val;
    j["test"] = split.test;
    j["ratio"] = split.split_ratio;
    emit(with_repro(j.dump(2) + "\n", repro_stanza(g.args, g.seed)), out);
    return 0;
}

int cmd_augment(const GlobalOpts& g, const std::string& in_dir, const std::string& out_dir,
                AugConfig cfg, const std::string& negatives_dir) {
    LoadedDataset ds = read_dataset(in_dir);
    std::vector<LabeledImage> negatives;
    if (!negatives_dir.empty()) negatives = read_image_dir(negatives_dir);
    if (cfg.negatives < 0 && negatives_dir.empty()) cfg.negatives = 0;

    cfg.seed = g.seed;
    cfg.threads = g.threads;
    DatasetDescriptor desc = ds.desc;
    desc.seed = g.seed;

    VariantResult var = generate_variant(ds.images, negatives, cfg, desc);
    const DatasetManifest m = write_dataset(out_dir, var.images, var.split, desc);

    DatasetManifest full = m;
    full.boxes_clamped = var.manifest.boxes_clamped;
    full.boxes_dropped = var.manifest.boxes_dropped;
    emit(with_repro(full.to_json_string(), repro_stanza(g.args, g.seed)),
         (std::filesystem::path(out_dir) / "manifest.json").string());
    std::cout << "wrote " << var.images.size() << " images to " << out_dir << " (train "
              << var.split.train.size() << ", val " << var.split.val.size() << ", test "
              << var.split.test.size() << ")\n";
    return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& gt_dir, const std::string& pred_file,
             double conf, const std::string& iou_range, const std::string& split_sel,
             bool all_point, const std::string& out, const std::string& sweep_out) {
    LoadedDataset ds = read_dataset(gt_dir);

    std::set<std::string> wanted;
    auto add_all = [&](const std::vector<std::string>& v) { wanted.insert(v.begin(), v.end()); };
    if (split_sel == "train") add_all(ds.split.train);
    else if (split_sel == "val") add_all(ds.split.val);
    else if (split_sel == "test") add_all(ds.split.test);
    else if (split_sel == "all") {
        add_all(ds.split.train);
        add_all(ds.split.val);
        add_all(ds.split.test);
    } else {
        throw InputError("--split must be one of train/val/test/all");
    }

    GroundTruth gt;
    gt.class_count = ds.desc.class_count();
    for (const auto& img : ds.images)
        if (wanted.count(img.id)) gt.images[img.id] = img.annotations;

    const auto dets = parse_predictions(read_text(pred_file), gt.class_count);

    EvalConfig cfg;
    cfg.conf_thr = conf;
    cfg.all_point_interpolation = all_point;
    if (!iou_range.empty()) cfg.iou_thresholds = parse_iou_range(iou_range);

    const EvalReport rep = evaluate(gt, dets, cfg);
    emit(with_repro(rep.to_json_string(), repro_stanza(g.args, g.seed)), out);
    if (!sweep_out.empty()) {
        emit(sweep_to_csv(confidence_sweep(gt, dets)), sweep_out);
    }
    return 0;
}

int cmd_budget(const GlobalOpts& g, const std::string& spec_file, double prune_width,
               const std::string& out) {
    ModelSpec spec = ModelSpec::load(spec_file);
    if (prune_width > 0) spec = prune(spec, prune_width);
    const BudgetReport rep = make_budget_report(spec);
    emit(with_repro(rep.to_json_string(), repro_stanza(g.args, g.seed)), out);
    return 0;
}

int cmd_bench(const GlobalOpts& g, const std::string& spec_file, int iters, int warmup,
              double sleep_ms, long long work_macs, const std::string& out) {
    ModelSpec spec = ModelSpec::load(spec_file);

    std::function<void()> workload;
    std::string workload_desc;
    if (sleep_ms > 0) {
        workload = [sleep_ms] {
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(sleep_ms));
        };
        workload_desc = "sleep " + std::to_string(sleep_ms) + " ms";
    } else {
        // synthetic single-threaded MAC loop; this times the harness stub,
        // not a real network
        workload = [work_macs] {
            volatile double sink = 0.0;
            double a = 1.000000001, b = 0.999999999, acc = 0.0;
            for (long long i = 0; i < work_macs; ++i) {
                acc = acc * b + a;
            }
            sink = acc;
            (void)sink;
        };
        workload_desc = "synthetic " + std::to_string(work_macs) + " MACs";
    }

    const LatencyStats stats = bench_latency(workload, warmup, iters);
    BudgetReport rep = make_budget_report(spec, stats);
    json j = json::parse(rep.to_json_string());
    j["conditions"] = {{"workload", workload_desc},
                       {"warmup", warmup},
                       {"iters", iters},
                       {"threads", 1}};
    emit(with_repro(j.dump(2) + "\n", repro_stanza(g.args, g.seed)), out);
    return stats.aborted ? 1 : 0;
}

std::vector<int> parse_hidden(const std::string& s) {
    std::vector<int> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

int cmd_train_toy(const GlobalOpts& g, const std::string& data, int side, int classes,
                  TrainConfig tcfg, SATConfig scfg, bool no_sat, const std::string& hidden,
                  const std::string& out, std::string history_out, std::string report_out) {
    std::vector<LabeledImage> train_set, val_set;
    if (data.rfind("synthetic:", 0) == 0) {
        const long n = std::strtol(data.c_str() + 10, nullptr, 10);
        if (n < 5) throw InputError("synthetic:N needs N >= 5");
        const auto images = make_synthetic_shapes(static_cast<int>(n), side, classes,
                                                  derive_seed(g.seed, "synth-data"));
        std::vector<std::string> ids;
        for (const auto& img : images) ids.push_back(img.id);
        const DatasetSplit split = split_dataset(ids, {0.6, 0.2, 0.2}, g.seed);
        std::set<std::string> train_ids(split.train.begin(), split.train.end());
        std::set<std::string> val_ids(split.val.begin(), split.val.end());
        for (const auto& img : images) {
            if (train_ids.count(img.id)) train_set.push_back(img);
            else if (val_ids.count(img.id)) val_set.push_back(img);
        }
    } else {
        LoadedDataset ds = read_dataset(data);
        classes = ds.desc.class_count();
        std::set<std::string> train_ids(ds.split.train.begin(), ds.split.train.end());
        std::set<std::string> val_ids(ds.split.val.begin(), ds.split.val.end());
        for (const auto& img : ds.images) {
            if (train_ids.count(img.id)) train_set.push_back(img);
            else if (val_ids.count(img.id)) val_set.push_back(img);
        }
        if (train_set.empty()) throw InputError("dataset has no train images");
        side = train_set.front().width_px;
    }

    ToyDetectorConfig dcfg;
    dcfg.input_side = side;
    dcfg.classes = classes;
    if (!hidden.empty()) dcfg.hidden = parse_hidden(hidden);
    dcfg.grid = side >> dcfg.hidden.size();
    tcfg.seed = g.seed;

    ToyDetector det = ToyDetector::random_init(dcfg, g.seed);
    const std::optional<SATConfig> sat_opt =
        no_sat ? std::nullopt : std::optional<SATConfig>(scfg);
    const TrainResult res = train(train_set, val_set, std::move(det), tcfg, sat_opt);

    res.detector.save(out);
    write_sidecar(out);
    if (history_out.empty()) history_out = out + ".history.csv";
    emit(history_to_csv(res.history), history_out);

    json rep;
    rep["map50"] = res.best_map50;
    rep["best_epoch"] = res.best_epoch;
    rep["epochs_run"] = res.history.size();
    rep["diverged"] = res.diverged;
    rep["train_images"] = train_set.size();
    rep["val_images"] = val_set.size();
    rep["sat"] = !no_sat;
    if (!report_out.empty())
        emit(with_repro(rep.dump(2) + "\n", repro_stanza(g.args, g.seed)), report_out);

    std::cout << "best val mAP@0.5 " << res.best_map50 << " at epoch " << res.best_epoch
              << " (" << res.history.size() << " epochs run)\n";
    if (res.diverged)
        throw std::runtime_error("training diverged; last finite checkpoint saved to " + out);
    return 0;
}

int cmd_report(const GlobalOpts& g, const std::vector<std::string>& compare,
               const std::vector<std::string>& aggregate, const std::string& out) {
    if (compare.empty() == aggregate.empty())
        throw InputError("report needs exactly one of --compare or --aggregate");

    if (!compare.empty()) {
        std::vector<ReportRow> rows;
        for (const auto& f : compare) rows.push_back(parse_report_file(f));
        if (g.out_format == "csv") {
            emit(rows_to_csv(rows), out);
        } else {
            json j = json::parse(rows_to_json(rows));
            json wrapped;
            wrapped["rows"] = j;
            wrapped["repro"] = repro_stanza(g.args, g.seed);
            emit(wrapped.dump(2) + "\n", out);
        }
        return 0;
    }

    std::vector<ReportRow> rows;
    for (const auto& f : aggregate) rows.push_back(parse_report_file(f));
    const AggregateReport agg = aggregate_rows(rows);
    if (g.out_format == "csv") {
        emit(aggregate_to_csv(agg), out);
    } else {
        json j = json::parse(aggregate_to_json(agg));
        j["repro"] = repro_stanza(g.args, g.seed);
        emit(j.dump(2) + "\n", out);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"dunedetect — dataset, augmentation, evaluation, and model-budget "
                 "tooling for desert-litter detection"};
    app.require_subcommand(1);

    GlobalOpts g;
    g.args = args;
    try {
        g.seed = env_seed();
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate a dataset directory and emit its manifest");
    std::string in_data, in_out;
    ingest->add_option("--data", in_data, "dataset directory")->required();
    ingest->add_option("--out", in_out, "manifest output path (default stdout)");

    // split
    auto* split = app.add_subcommand("split", "deterministic train/val/test split");
    std::string sp_ids, sp_ratio = "0.6,0.2,0.2", sp_out;
    long sp_count = 0;
    split->add_option("--ids", sp_ids, "file with one image id per line");
    split->add_option("--count", sp_count, "generate N synthetic ids instead");
    split->add_option("--ratio", sp_ratio, "train,val,test fractions");
    split->add_option("--out", sp_out, "output path (default stdout)");

    // augment
    auto* augment = app.add_subcommand("augment", "generate a dataset variant");
    std::string au_in, au_out, au_neg;
    AugConfig au_cfg;
    augment->add_option("--in", au_in, "input dataset directory")->required();
    augment->add_option("--out", au_out, "output dataset directory")->required();
    augment->add_option("--num-geom", au_cfg.num_geom, "geometric copies per source image");
    augment->add_option("--num-cutmix", au_cfg.num_cutmix, "cutmix copies per source image");
    augment->add_option("--num-mosaic", au_cfg.num_mosaic, "mosaic composites per source image");
    augment->add_option("--negatives", au_neg, "directory of negative (background) PNGs");
    augment->add_option("--negatives-count", au_cfg.negatives,
                        "how many negatives to inject (-1 = all)");
    augment->add_flag("--paper-faithful-split", au_cfg.paper_faithful_split,
                      "augment all splits, then split (leaks augmented copies)");
    augment->add_option("--min-visibility", au_cfg.min_visibility,
                        "box survival threshold after clipping");
    augment->add_option("--cutmix-transfer", au_cfg.cutmix_transfer,
                        "cutmix transfer/occlusion threshold");
    augment->add_option("--center-jitter", au_cfg.center_jitter, "mosaic center jitter");

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against a dataset");
    std::string ev_gt, ev_pred, ev_iou, ev_split = "all", ev_out, ev_sweep;
    double ev_conf = 0.25;
    bool ev_allpoint = false;
    eval->add_option("--gt", ev_gt, "ground-truth dataset directory")->required();
    eval->add_option("--pred", ev_pred, "predictions file")->required();
    eval->add_option("--conf", ev_conf, "confidence threshold for P/R/F1");
    eval->add_option("--iou-range", ev_iou, "lo:hi:step or single threshold");
    eval->add_option("--split", ev_split, "train/val/test/all");
    eval->add_flag("--all-point", ev_allpoint, "all-point AP instead of 101-point");
    eval->add_option("--out", ev_out, "report path (default stdout)");
    eval->add_option("--sweep", ev_sweep, "write threshold,precision,recall,f1 CSV");

    // budget
    auto* budget = app.add_subcommand("budget", "params/FLOPs/size for a model spec");
    std::string bu_spec, bu_out;
    double bu_prune = 0.0;
    budget->add_option("--spec", bu_spec, "model spec JSON")->required();
    budget->add_option("--prune-width", bu_prune, "prune to this width multiple first");
    budget->add_option("--out", bu_out, "report path (default stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "latency micro-benchmark harness");
    std::string be_spec, be_out;
    int be_iters = 100, be_warmup = 10;
    double be_sleep = 0.0;
    long long be_macs = 5000000;
    bench->add_option("--spec", be_spec, "model spec JSON")->required();
    bench->add_option("--iters", be_iters, "measured iterations (>= 10)");
    bench->add_option("--warmup", be_warmup, "untimed warmup iterations");
    bench->add_option("--sleep-ms", be_sleep, "time a sleep stub instead of compute");
    bench->add_option("--work-macs", be_macs, "synthetic workload size");
    bench->add_option("--out", be_out, "report path (default stdout)");

    // train-toy
    auto* traint = app.add_subcommand("train-toy", "train the toy grid detector with SAT");
    std::string tr_data, tr_hidden, tr_out = "toydet.ckpt", tr_hist, tr_report;
    int tr_side = 32, tr_classes = 3;
    bool tr_nosat = false;
    TrainConfig tr_cfg;
    SATConfig tr_sat;
    traint->add_option("--data", tr_data, "dataset dir or synthetic:N")->required();
    traint->add_option("--side", tr_side, "synthetic image side");
    traint->add_option("--classes", tr_classes, "synthetic class count");
    traint->add_option("--epochs", tr_cfg.epochs, "max epochs");
    traint->add_option("--patience", tr_cfg.patience, "early-stop patience");
    traint->add_option("--batch", tr_cfg.batch_size, "batch size");
    traint->add_option("--lr", tr_cfg.lr, "learning rate");
    traint->add_option("--sat-eps", tr_sat.epsilon, "perturbation bound");
    traint->add_option("--sat-prob", tr_sat.apply_prob, "fraction of batches perturbed");
    std::string tr_mode = "sign_ascent";
    traint->add_option("--sat-mode", tr_mode, "sign_ascent or objectness_hide");
    traint->add_flag("--no-sat", tr_nosat, "plain single-pass training");
    traint->add_option("--hidden", tr_hidden, "hidden conv channels, e.g. 8,16");
    traint->add_option("--out", tr_out, "checkpoint output path");
    traint->add_option("--history", tr_hist, "history CSV path");
    traint->add_option("--report", tr_report, "summary report JSON path");

    // report
    auto* report = app.add_subcommand("report", "compare or aggregate run reports");
    std::vector<std::string> rp_compare, rp_aggregate;
    std::string rp_out;
    report->add_option("--compare", rp_compare, "report files, one row each");
    report->add_option("--aggregate", rp_aggregate, "report files, mean±sd");
    report->add_option("--out", rp_out, "output path (default stdout)");

    app.add_option("--seed", g.seed, "global RNG seed (overrides DUNE_DETECT_SEED)");
    app.add_option("--threads", g.threads, "parallelism bound inside modules");
    app.add_option("--out-format", g.out_format, "json or csv (report subcommand)")
        ->check(CLI::IsMember({"json", "csv"}));
    for (auto* sub : {ingest, split, augment, eval, budget, bench, traint, report})
        sub->fallthrough();

    std::vector<const char*> argv;
    argv.push_back("dunedetect");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(g, in_data, in_out);
        if (split->parsed()) return cmd_split(g, sp_ids, sp_count, sp_ratio, sp_out);
        if (augment->parsed()) return cmd_augment(g, au_in, au_out, au_cfg, au_neg);
        if (eval->parsed())
            return cmd_eval(g, ev_gt, ev_pred, ev_conf, ev_iou, ev_split, ev_allpoint,
                            ev_out, ev_sweep);
        if (budget->parsed()) return cmd_budget(g, bu_spec, bu_prune, bu_out);
        if (bench->parsed())
            return cmd_bench(g, be_spec, be_iters, be_warmup, be_sleep, be_macs, be_out);
        if (traint->parsed()) {
            if (tr_mode == "objectness_hide") tr_sat.mode = SATMode::objectness_hide;
            else if (tr_mode != "sign_ascent") throw InputError("bad --sat-mode");
            return cmd_train_toy(g, tr_data, tr_side, tr_classes, tr_cfg, tr_sat, tr_nosat,
                                 tr_hidden, tr_out, tr_hist, tr_report);
        }
        if (report->parsed()) return cmd_report(g, rp_compare, rp_aggregate, rp_out);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << app.help();
    return 2;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace dunedetect
