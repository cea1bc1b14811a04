#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dunedetect/bench.hpp"

namespace dunedetect {

enum class LayerKind { conv, depthwise_conv, linear, detect_head };

const char* to_string(LayerKind k);
LayerKind layer_kind_from_string(const std::string& s);

/// Channel counts are base (pre-multiplier) values. detect_head output
/// channels are fixed by the class/anchor layout and never width-scaled;
/// channel counts <= 4 are raw image planes and pass through unscaled.
struct LayerSpec {
    LayerKind kind = LayerKind::conv;
    std::string name;
    long in_ch = 0;
    long out_ch = 0;
    int kernel = 1;
    int stride = 1;
    int repeats = 1;
};

struct ModelSpec {
    std::vector<LayerSpec> layers;
    double width_multiple = 1.0;
    double depth_multiple = 1.0;
    long max_channels = 1024;
    int input_side = 640;

    void validate() const;

    std::string to_json_string() const;
    static ModelSpec from_json_string(const std::string& text);
    static ModelSpec load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;
};

struct BudgetReport {
    long long params = 0;
    long long macs = 0;
    double flops_g = 0.0;  // GFLOPs = 2 * macs / 1e9
    double size_mb = 0.0;
    std::optional<LatencyStats> latency;

    std::string to_json_string() const;
};

/// min(max_channels, base_ch * width rounded up to a multiple of 8)
long scale_channels(long base_ch, double width_multiple, long max_channels);

long long count_params(const ModelSpec& spec);

/// Multiply-accumulates for one forward pass at spec.input_side, assuming
/// same-padding odd kernels. Throws ValidationError when a stride exceeds
/// the remaining spatial extent.
long long count_macs(const ModelSpec& spec);

/// FLOPs counted as 2 x MACs.
long long count_flops(const ModelSpec& spec);

/// Same layers, narrower width. Widening is rejected.
ModelSpec prune(const ModelSpec& spec, double new_width);

/// params * bytes_per_param / 2^20 + overhead. Defaults model a
/// half-precision export with constant header overhead.
double estimate_size_mb(long long params, double bytes_per_param = 2.0,
                        double overhead_mb = 0.35);

BudgetReport make_budget_report(const ModelSpec& spec,
                                std::optional<LatencyStats> latency = std::nullopt);

}  // namespace dunedetect
