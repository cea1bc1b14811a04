#include "dunedetect/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "dunedetect/types.hpp"

namespace dunedetect {

namespace {

// timing interference guard: one benchmark per process
std::atomic<bool> g_bench_running{false};

struct BenchGuard {
    BenchGuard() {
        bool expected = false;
        if (!g_bench_running.compare_exchange_strong(expected, true))
            throw std::runtime_error("a benchmark is already running in this process");
    }
    ~BenchGuard() { g_bench_running.store(false); }
};

void fill_stats(LatencyStats& s) {
    if (s.samples_ms.empty()) return;
    std::vector<double> sorted = s.samples_ms;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    s.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    s.median_ms = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    const size_t rank = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(n)));
    s.p95_ms = sorted[std::min(n - 1, rank == 0 ? 0 : rank - 1)];
}

}  // namespace

LatencyStats bench_latency(const std::function<void()>& f, int warmup, int iters) {
    if (iters < 10) throw InputError("bench: iters must be >= 10");
    if (warmup < 0) throw InputError("bench: warmup must be >= 0");

    BenchGuard guard;
    LatencyStats stats;
    stats.samples_ms.reserve(static_cast<size_t>(iters));

    using clock = std::chrono::steady_clock;
    try {
        for (int i = 0; i < warmup; ++i) f();
        for (int i = 0; i < iters; ++i) {
            const auto t0 = clock::now();
            f();
            const auto t1 = clock::now();
            stats.samples_ms.push_back(
                std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
    } catch (const std::exception& e) {
        stats.aborted = true;
        stats.error = e.what();
    }
    fill_stats(stats);
    return stats;
}

std::string LatencyStats::to_json_string() const {
    nlohmann::json j;
    j["mean_ms"] = mean_ms;
    j["median_ms"] = median_ms;
    j["p95_ms"] = p95_ms;
    j["samples_ms"] = samples_ms;
    j["aborted"] = aborted;
    j["error"] = error;
    return j.dump(2) + "\n";
}

}  // namespace dunedetect
