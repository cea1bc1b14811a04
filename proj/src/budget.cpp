#include "dunedetect/budget.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dunedetect/types.hpp"

namespace dunedetect {

namespace {

using nlohmann::json;

/// channel counts <= 4 are raw image planes and bypass the multiplier
long resolve_ch(long base_ch, const ModelSpec& spec) {
    if (base_ch <= 4) return base_ch;
    return scale_channels(base_ch, spec.width_multiple, spec.max_channels);
}

int effective_repeats(const LayerSpec& l, const ModelSpec& spec) {
    return static_cast<int>(
        std::max<long>(1, std::lround(l.repeats * spec.depth_multiple)));
}

/// per-repeat parameter count with multipliers applied
long long layer_params(const LayerSpec& l, const ModelSpec& spec) {
    const long long k2 = static_cast<long long>(l.kernel) * l.kernel;
    switch (l.kind) {
        case LayerKind::conv: {
            const long long in = resolve_ch(l.in_ch, spec), out = resolve_ch(l.out_ch, spec);
            return in * out * k2 + out;
        }
        case LayerKind::depthwise_conv: {
            const long long ch = resolve_ch(l.in_ch, spec);
            return ch * k2 + ch;
        }
        case LayerKind::linear: {
            const long long in = resolve_ch(l.in_ch, spec), out = resolve_ch(l.out_ch, spec);
            return in * out + out;
        }
        case LayerKind::detect_head: {
            // head output channels are fixed by the class/anchor layout
            const long long in = resolve_ch(l.in_ch, spec);
            return in * l.out_ch * k2 + l.out_ch;
        }
    }
    return 0;
}

/// per-repeat multiply-accumulates at the layer's output resolution
long long layer_macs(const LayerSpec& l, const ModelSpec& spec, long long out_hw) {
    const long long k2 = static_cast<long long>(l.kernel) * l.kernel;
    switch (l.kind) {
        case LayerKind::conv:
            return resolve_ch(l.in_ch, spec) * resolve_ch(l.out_ch, spec) * k2 * out_hw;
        case LayerKind::depthwise_conv:
            return resolve_ch(l.in_ch, spec) * k2 * out_hw;
        case LayerKind::linear:
            return static_cast<long long>(resolve_ch(l.in_ch, spec)) *
                   resolve_ch(l.out_ch, spec);
        case LayerKind::detect_head:
            return resolve_ch(l.in_ch, spec) * l.out_ch * k2 * out_hw;
    }
    return 0;
}

}  // namespace

const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::conv: return "conv";
        case LayerKind::depthwise_conv: return "depthwise_conv";
        case LayerKind::linear: return "linear";
        case LayerKind::detect_head: return "detect_head";
    }
    return "conv";
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "conv") return LayerKind::conv;
    if (s == "depthwise_conv") return LayerKind::depthwise_conv;
    if (s == "linear") return LayerKind::linear;
    if (s == "detect_head") return LayerKind::detect_head;
    throw ValidationError("unknown layer kind '" + s + "'");
}

void ModelSpec::validate() const {
    if (!(width_multiple > 0.0 && width_multiple <= 1.0))
        throw ValidationError("width_multiple must be in (0,1]");
    if (!(depth_multiple > 0.0 && depth_multiple <= 1.0))
        throw ValidationError("depth_multiple must be in (0,1]");
    if (max_channels < 8) throw ValidationError("max_channels must be >= 8");
    if (input_side < 1) throw ValidationError("input_side must be >= 1");
    for (const auto& l : layers) {
        if (l.kernel < 1 || l.kernel % 2 == 0)
            throw ValidationError("layer '" + l.name + "': kernel must be odd and >= 1");
        if (l.stride < 1) throw ValidationError("layer '" + l.name + "': stride must be >= 1");
        if (l.in_ch < 1 || l.out_ch < 1)
            throw ValidationError("layer '" + l.name + "': channel counts must be >= 1");
        if (l.repeats < 1)
            throw ValidationError("layer '" + l.name + "': repeats must be >= 1");
        if (l.kind == LayerKind::depthwise_conv && l.in_ch != l.out_ch)
            throw ValidationError("layer '" + l.name + "': depthwise requires in_ch == out_ch");
    }
}

long scale_channels(long base_ch, double width_multiple, long max_channels) {
    if (base_ch < 1) throw ValidationError("base_ch must be >= 1");
    if (width_multiple <= 0) throw ValidationError("width_multiple must be > 0");
    // small epsilon keeps exact multiples from rounding up one notch
    const long rounded =
        8l * static_cast<long>(std::ceil((base_ch * width_multiple - 1e-9) / 8.0));
    return std::min(max_channels, std::max(8l, rounded));
}

long long count_params(const ModelSpec& spec) {
    spec.validate();
    long long total = 0;
    for (const auto& l : spec.layers)
        total += layer_params(l, spec) * effective_repeats(l, spec);
    return total;
}

long long count_macs(const ModelSpec& spec) {
    spec.validate();
    long long total = 0;
    long h = spec.input_side;
    for (const auto& l : spec.layers) {
        if (l.kind == LayerKind::linear) {
            total += layer_macs(l, spec, 1) * effective_repeats(l, spec);
            h = 1;
            continue;
        }
        if (l.stride > h)
            throw ValidationError("layer '" + l.name + "': stride " +
                                  std::to_string(l.stride) + " exceeds spatial side " +
                                  std::to_string(h));
        // same padding, odd kernel; the stride applies on the first repeat
        h = (h - 1) / l.stride + 1;
        const long long out_hw = static_cast<long long>(h) * h;
        total += layer_macs(l, spec, out_hw) * effective_repeats(l, spec);
    }
    return total;
}

long long count_flops(const ModelSpec& spec) { return 2 * count_macs(spec); }

ModelSpec prune(const ModelSpec& spec, double new_width) {
    spec.validate();
    if (!(new_width > 0.0))
        throw ValidationError("prune: new width must be positive");
    if (new_width > spec.width_multiple)
        throw ValidationError("prune: widening from " + std::to_string(spec.width_multiple) +
                              " to " + std::to_string(new_width) + " rejected");
    ModelSpec out = spec;
    out.width_multiple = new_width;
    return out;
}

double estimate_size_mb(long long params, double bytes_per_param, double overhead_mb) {
    if (params < 0) throw ValidationError("negative parameter count");
    return static_cast<double>(params) * bytes_per_param / (1024.0 * 1024.0) + overhead_mb;
}

BudgetReport make_budget_report(const ModelSpec& spec, std::optional<LatencyStats> latency) {
    BudgetReport rep;
    rep.params = count_params(spec);
    rep.macs = count_macs(spec);
    rep.flops_g = 2.0 * static_cast<double>(rep.macs) / 1e9;
    rep.size_mb = estimate_size_mb(rep.params);
    rep.latency = std::move(latency);
    return rep;
}

std::string ModelSpec::to_json_string() const {
    json j;
    j["width_multiple"] = width_multiple;
    j["depth_multiple"] = depth_multiple;
    j["max_channels"] = max_channels;
    j["input_side"] = input_side;
    j["layers"] = json::array();
    for (const auto& l : layers) {
        json lj;
        lj["kind"] = to_string(l.kind);
        lj["name"] = l.name;
        lj["in_ch"] = l.in_ch;
        lj["out_ch"] = l.out_ch;
        lj["kernel"] = l.kernel;
        lj["stride"] = l.stride;
        lj["repeats"] = l.repeats;
        j["layers"].push_back(lj);
    }
    return j.dump(2) + "\n";
}

ModelSpec ModelSpec::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model spec: ") + e.what());
    }
    ModelSpec spec;
    try {
        if (j.contains("width_multiple")) spec.width_multiple = j["width_multiple"];
        if (j.contains("depth_multiple")) spec.depth_multiple = j["depth_multiple"];
        if (j.contains("max_channels")) spec.max_channels = j["max_channels"];
        if (j.contains("input_side")) spec.input_side = j["input_side"];
        for (const auto& lj : j.at("layers")) {
            LayerSpec l;
            l.kind = layer_kind_from_string(lj.at("kind").get<std::string>());
            if (lj.contains("name")) l.name = lj["name"];
            l.in_ch = lj.at("in_ch");
            l.out_ch = lj.at("out_ch");
            if (lj.contains("kernel")) l.kernel = lj["kernel"];
            if (lj.contains("stride")) l.stride = lj["stride"];
            if (lj.contains("repeats")) l.repeats = lj["repeats"];
            spec.layers.push_back(std::move(l));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

ModelSpec ModelSpec::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

void ModelSpec::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << to_json_string();
}

std::string BudgetReport::to_json_string() const {
    json j;
    j["params"] = params;
    j["macs"] = macs;
    j["flops"] = 2 * macs;
    j["flops_g"] = flops_g;
    j["size_mb"] = size_mb;
    j["latency"] = latency ? json::parse(latency->to_json_string()) : json(nullptr);
    return j.dump(2) + "\n";
}

}  // namespace dunedetect
