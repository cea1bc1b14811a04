#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dunedetect {

struct LatencyStats {
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    std::vector<double> samples_ms;  // measured iterations, warmup excluded
    bool aborted = false;
    std::string error;

    std::string to_json_string() const;
};

/// Times `f` on the monotonic clock: `warmup` untimed calls, then `iters`
/// timed ones. Only one benchmark may run per process at a time (concurrent
/// entry throws); a throwing callable aborts the run and the partial samples
/// are kept with aborted=true.
LatencyStats bench_latency(const std::function<void()>& f, int warmup, int iters);

}  // namespace dunedetect
