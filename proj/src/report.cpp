#include "dunedetect/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dunedetect/types.hpp"

namespace dunedetect {

namespace {

using nlohmann::json;

std::optional<double> opt_num(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number()) return std::nullopt;
    return j[key].get<double>();
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string cell(const std::optional<double>& v) { return v ? fmt_num(*v) : ""; }
std::string cell(const std::optional<long long>& v) {
    return v ? std::to_string(*v) : "";
}

json null_or(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// mean and sample standard deviation over the defined entries
std::optional<std::pair<double, double>> mean_sd(const std::vector<double>& vals) {
    if (vals.empty()) return std::nullopt;
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = vals.size() > 1 ? var / static_cast<double>(vals.size() - 1) : 0.0;
    return std::make_pair(mean, std::sqrt(var));
}

json pair_json(const std::optional<std::pair<double, double>>& p) {
    if (!p) return json(nullptr);
    return json{{"mean", p->first}, {"sd", p->second}};
}

std::string pair_cell(const std::optional<std::pair<double, double>>& p) {
    if (!p) return "";
    return fmt_num(p->first) + "±" + fmt_num(p->second);
}

}  // namespace

ReportRow parse_report_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();

    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ValidationError(file.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError(file.string() + ": report must be an object");

    ReportRow row;
    row.name = file.stem().string();
    row.map5095 = opt_num(j, "map5095");
    row.map50 = opt_num(j, "map50");
    row.map75 = opt_num(j, "map75");
    if (j.contains("params") && j["params"].is_number_integer())
        row.params = j["params"].get<long long>();
    row.flops_g = opt_num(j, "flops_g");
    row.size_mb = opt_num(j, "size_mb");
    row.latency_ms = opt_num(j, "latency_ms");
    if (!row.latency_ms && j.contains("latency") && j["latency"].is_object())
        row.latency_ms = opt_num(j["latency"], "median_ms");

    if (!row.map5095 && !row.map50 && !row.map75 && !row.params && !row.flops_g &&
        !row.size_mb && !row.latency_ms)
        throw ValidationError(file.string() + ": no recognized report fields");
    return row;
}

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
    std::string out = "name,map5095,map50,map75,params,flops_g,size_mb,latency_ms\n";
    for (const auto& r : rows) {
        out += r.name + "," + cell(r.map5095) + "," + cell(r.map50) + "," + cell(r.map75) +
               "," + cell(r.params) + "," + cell(r.flops_g) + "," + cell(r.size_mb) + "," +
               cell(r.latency_ms) + "\n";
    }
    return out;
}

std::string rows_to_json(const std::vector<ReportRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json j;
        j["name"] = r.name;
        j["map5095"] = null_or(r.map5095);
        j["map50"] = null_or(r.map50);
        j["map75"] = null_or(r.map75);
        j["params"] = r.params ? json(*r.params) : json(nullptr);
        j["flops_g"] = null_or(r.flops_g);
        j["size_mb"] = null_or(r.size_mb);
        j["latency_ms"] = null_or(r.latency_ms);
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

AggregateReport aggregate_rows(const std::vector<ReportRow>& rows) {
    AggregateReport agg;
    std::vector<double> v5095, v50, v75, vp, vf, vs, vl;
    for (const auto& r : rows) {
        agg.inputs.push_back(r.name);
        if (r.map5095) v5095.push_back(*r.map5095);
        if (r.map50) v50.push_back(*r.map50);
        if (r.map75) v75.push_back(*r.map75);
        if (r.params) vp.push_back(static_cast<double>(*r.params));
        if (r.flops_g) vf.push_back(*r.flops_g);
        if (r.size_mb) vs.push_back(*r.size_mb);
        if (r.latency_ms) vl.push_back(*r.latency_ms);
    }
    agg.map5095 = mean_sd(v5095);
    agg.map50 = mean_sd(v50);
    agg.map75 = mean_sd(v75);
    agg.params = mean_sd(vp);
    agg.flops_g = mean_sd(vf);
    agg.size_mb = mean_sd(vs);
    agg.latency_ms = mean_sd(vl);
    return agg;
}

std::string aggregate_to_json(const AggregateReport& agg) {
    json j;
    j["inputs"] = agg.inputs;
    j["map5095"] = pair_json(agg.map5095);
    j["map50"] = pair_json(agg.map50);
    j["map75"] = pair_json(agg.map75);
    j["params"] = pair_json(agg.params);
    j["flops_g"] = pair_json(agg.flops_g);
    j["size_mb"] = pair_json(agg.size_mb);
    j["latency_ms"] = pair_json(agg.latency_ms);
    return j.dump(2) + "\n";
}

std::string aggregate_to_csv(const AggregateReport& agg) {
    std::string out = "name,map5095,map50,map75,params,flops_g,size_mb,latency_ms\n";
    out += "aggregate(" + std::to_string(agg.inputs.size()) + ")," +
           pair_cell(agg.map5095) + "," + pair_cell(agg.map50) + "," +
           pair_cell(agg.map75) + "," + pair_cell(agg.params) + "," +
           pair_cell(agg.flops_g) + "," + pair_cell(agg.size_mb) + "," +
           pair_cell(agg.latency_ms) + "\n";
    return out;
}

}  // namespace dunedetect
