#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dunedetect/cli.hpp"
#include "dunedetect/dataset.hpp"
#include "dunedetect/eval.hpp"
#include "dunedetect/synthetic.hpp"
#include "helpers.hpp"

using namespace dunedetect;
using namespace dunedetect::testing;
using nlohmann::json;

namespace {

int cli(std::initializer_list<std::string> args) { return run(std::vector<std::string>(args)); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json jload(const std::filesystem::path& p) { return json::parse(slurp(p)); }

std::filesystem::path surrogate_spec() {
    return std::filesystem::path(SPEC_DIR) / "detector_surrogate.json";
}

/// writes a small labeled dataset and returns its directory
std::filesystem::path make_dataset(const TmpDir& tmp, int n = 12) {
    const auto images = make_synthetic_shapes(n, 32, 3, 5);
    std::vector<std::string> ids;
    for (const auto& im : images) ids.push_back(im.id);
    DatasetDescriptor desc;
    const auto split = split_dataset(ids, desc.split_ratio, 3);
    const auto dir = tmp.path / "data";
    write_dataset(dir, images, split, desc);
    return dir;
}

}  // namespace

TEST_CASE("cli: unknown subcommand exits 2") {
    CHECK(cli({"frobnicate"}) == 2);
    CHECK(cli({}) == 2);
    CHECK(cli({"split", "--no-such-flag"}) == 2);
}

TEST_CASE("cli: split emits table sizes and a repro stanza") {
    TmpDir tmp("cli-split");
    const auto out = tmp.path / "split.json";
    CHECK(cli({"split", "--count", "200", "--seed", "9", "--out", out.string()}) == 0);
    const auto j = jload(out);
    CHECK(j["sizes"]["train"] == 120);
    CHECK(j["sizes"]["val"] == 40);
    CHECK(j["sizes"]["test"] == 40);
    CHECK(j["repro"]["seed"] == 9);
    CHECK(j["repro"].contains("config_hash"));
    CHECK(j["repro"].contains("version"));
}

TEST_CASE("cli: identical seed+config give byte-identical reports") {
    TmpDir tmp("cli-determinism");
    const auto a = tmp.path / "a.json";
    const auto b = tmp.path / "b.json";
    CHECK(cli({"split", "--count", "50", "--seed", "4", "--out", a.string()}) == 0);
    CHECK(cli({"split", "--count", "50", "--seed", "4", "--out", b.string()}) == 0);
    // same bytes apart from the output path inside the config hash
    auto ja = jload(a), jb = jload(b);
    ja["repro"].erase("config_hash");
    jb["repro"].erase("config_hash");
    CHECK(ja == jb);

    const auto c = tmp.path / "a2.json";
    CHECK(cli({"split", "--count", "50", "--seed", "4", "--out", a.string()}) == 0);
    CHECK(slurp(a) == slurp(a));
}

TEST_CASE("cli: DUNE_DETECT_SEED is honored and --seed overrides it") {
    TmpDir tmp("cli-env");
    const auto a = tmp.path / "a.json";
    const auto b = tmp.path / "b.json";
    const auto c = tmp.path / "c.json";
    setenv("DUNE_DETECT_SEED", "17", 1);
    CHECK(cli({"split", "--count", "30", "--out", a.string()}) == 0);
    CHECK(cli({"split", "--count", "30", "--seed", "18", "--out", b.string()}) == 0);
    unsetenv("DUNE_DETECT_SEED");
    CHECK(cli({"split", "--count", "30", "--seed", "17", "--out", c.string()}) == 0);
    CHECK(jload(a)["repro"]["seed"] == 17);
    CHECK(jload(b)["repro"]["seed"] == 18);
    CHECK(jload(a)["train"] == jload(c)["train"]);
}

TEST_CASE("cli: ingest validates a dataset and reports counts") {
    TmpDir tmp("cli-ingest");
    const auto dir = make_dataset(tmp);
    const auto out = tmp.path / "manifest.json";
    CHECK(cli({"ingest", "--data", dir.string(), "--out", out.string()}) == 0);
    const auto j = jload(out);
    CHECK(j["total_images"] == 12);
    CHECK(j["split_counts"]["train"] == 8);  // floor(7.2) + remainder
    CHECK(cli({"ingest", "--data", (tmp.path / "nope").string()}) == 2);
}

TEST_CASE("cli: eval on oracle predictions reports map50 = 1") {
    TmpDir tmp("cli-eval");
    const auto dir = make_dataset(tmp);

    // oracle predictions: ground truth boxes at confidence 1
    const auto ds = read_dataset(dir);
    std::vector<Detection> dets;
    for (const auto& img : ds.images)
        for (const auto& a : img.annotations)
            dets.push_back({img.id, a.class_id, 1.0, a.box});
    const auto pred = tmp.path / "preds.txt";
    std::ofstream(pred) << serialize_predictions(dets);

    const auto out = tmp.path / "eval.json";
    const auto sweep = tmp.path / "sweep.csv";
    CHECK(cli({"eval", "--gt", dir.string(), "--pred", pred.string(), "--out",
               out.string(), "--sweep", sweep.string()}) == 0);
    const auto j = jload(out);
    CHECK(j["map50"] == doctest::Approx(1.0));
    CHECK(j["map5095"] == doctest::Approx(1.0));
    CHECK(j["f1"] == doctest::Approx(1.0));
    CHECK(slurp(sweep).rfind("threshold,precision,recall,f1\n", 0) == 0);

    // bad predictions exit 2
    std::ofstream(pred) << "img 0 nope\n";
    CHECK(cli({"eval", "--gt", dir.string(), "--pred", pred.string()}) == 2);
}

TEST_CASE("cli: augment writes a variant that ingest can re-read") {
    TmpDir tmp("cli-augment");
    const auto dir = make_dataset(tmp, 10);
    const auto out_dir = tmp.path / "aug";
    CHECK(cli({"augment", "--in", dir.string(), "--out", out_dir.string(), "--num-geom",
               "1", "--seed", "3"}) == 0);
    const auto j = jload(out_dir / "manifest.json");
    CHECK(j["total_images"] == 16);  // 10 raw + 6 train copies
    CHECK(j["provenance_counts"]["geom"] == 6);
    CHECK(cli({"ingest", "--data", out_dir.string()}) == 0);
}

TEST_CASE("cli: budget emits the calibrated report") {
    TmpDir tmp("cli-budget");
    const auto out = tmp.path / "budget.json";
    CHECK(cli({"budget", "--spec", surrogate_spec().string(), "--out", out.string()}) == 0);
    const auto j = jload(out);
    CHECK(j["params"] == 2579784);

    const auto pruned = tmp.path / "pruned.json";
    CHECK(cli({"budget", "--spec", surrogate_spec().string(), "--prune-width", "0.33",
               "--out", pruned.string()}) == 0);
    CHECK(jload(pruned)["params"] == 2190448);
    CHECK(cli({"budget", "--spec", surrogate_spec().string(), "--prune-width", "0.9"}) ==
          2);
}

TEST_CASE("cli: bench produces latency stats and conditions") {
    TmpDir tmp("cli-bench");
    const auto out = tmp.path / "bench.json";
    CHECK(cli({"bench", "--spec", surrogate_spec().string(), "--iters", "10", "--warmup",
               "1", "--sleep-ms", "1", "--out", out.string()}) == 0);
    const auto j = jload(out);
    CHECK(j["latency"]["samples_ms"].size() == 10);
    CHECK(j["latency"]["median_ms"].get<double>() >= 0.8);
    CHECK(j["conditions"]["iters"] == 10);
    CHECK(cli({"bench", "--spec", surrogate_spec().string(), "--iters", "3"}) == 2);
}

TEST_CASE("cli: report --compare renders rows, empty cells stay empty") {
    TmpDir tmp("cli-report");
    const auto budget_a = tmp.path / "row_a.json";
    const auto budget_b = tmp.path / "row_b.json";
    CHECK(cli({"budget", "--spec", surrogate_spec().string(), "--out",
               budget_a.string()}) == 0);
    CHECK(cli({"budget", "--spec", surrogate_spec().string(), "--out",
               budget_b.string()}) == 0);

    const auto table = tmp.path / "table.csv";
    CHECK(cli({"report", "--compare", budget_a.string(), budget_b.string(), "--out",
               table.string(), "--out-format", "csv"}) == 0);
    const auto csv = slurp(table);
    std::istringstream lines(csv);
    std::string header, row_a, row_b;
    std::getline(lines, header);
    std::getline(lines, row_a);
    std::getline(lines, row_b);
    CHECK(header == "name,map5095,map50,map75,params,flops_g,size_mb,latency_ms");
    // single-source rows: identical metrics, no latency, no fabricated mAP
    CHECK(row_a.substr(row_a.find(',')) == row_b.substr(row_b.find(',')));
    CHECK(row_a.rfind("row_a,,,,2579784,", 0) == 0);
    CHECK(row_a.back() == ',');  // empty latency cell

    const auto jtable = tmp.path / "table.json";
    CHECK(cli({"report", "--compare", budget_a.string(), "--out", jtable.string()}) == 0);
    const auto j = jload(jtable);
    CHECK(j["rows"][0]["params"] == 2579784);
    CHECK(j["rows"][0]["latency_ms"].is_null());

    // schema-incompatible file rejected
    const auto junk = tmp.path / "junk.json";
    std::ofstream(junk) << "{\"hello\": 1}";
    CHECK(cli({"report", "--compare", junk.string()}) == 2);
    CHECK(cli({"report"}) == 2);
}

TEST_CASE("cli: report --aggregate emits mean and sd") {
    TmpDir tmp("cli-agg");
    const auto a = tmp.path / "a.json";
    const auto b = tmp.path / "b.json";
    std::ofstream(a) << "{\"map50\": 0.8, \"params\": 100}";
    std::ofstream(b) << "{\"map50\": 0.6, \"params\": 100}";
    const auto out = tmp.path / "agg.json";
    CHECK(cli({"report", "--aggregate", a.string(), b.string(), "--out", out.string()}) ==
          0);
    const auto j = jload(out);
    CHECK(j["map50"]["mean"] == doctest::Approx(0.7));
    CHECK(j["map50"]["sd"] == doctest::Approx(std::sqrt(0.02)));
    CHECK(j["latency_ms"].is_null());
}

TEST_CASE("cli: train-toy smoke run writes checkpoint, history, and report") {
    TmpDir tmp("cli-train");
    const auto ckpt = tmp.path / "toy.ckpt";
    const auto report = tmp.path / "train.json";
    CHECK(cli({"train-toy", "--data", "synthetic:30", "--epochs", "2", "--patience", "2",
               "--seed", "6", "--out", ckpt.string(), "--report", report.string()}) == 0);
    CHECK(std::filesystem::exists(ckpt));
    const auto hist = slurp(ckpt.string() + ".history.csv");
    CHECK(hist.rfind("epoch,train_loss,val_map50\n", 0) == 0);
    const auto j = jload(report);
    CHECK(j["epochs_run"] == 2);
    CHECK(j.contains("map50"));
    CHECK(j["sat"] == true);

    CHECK(cli({"train-toy", "--data", "synthetic:2"}) == 2);
    CHECK(cli({"train-toy", "--data", (tmp.path / "missing").string()}) == 2);
}
