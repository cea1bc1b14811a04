#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dunedetect {

/// One comparison row in the benchmarking-table schema. Missing fields stay
/// empty in the rendered table, never fabricated.
struct ReportRow {
    std::string name;
    std::optional<double> map5095;
    std::optional<double> map50;
    std::optional<double> map75;
    std::optional<long long> params;
    std::optional<double> flops_g;
    std::optional<double> size_mb;
    std::optional<double> latency_ms;
};

/// Reads an eval report, budget report, or combined run report. Files
/// carrying none of the known metric fields are rejected.
ReportRow parse_report_file(const std::filesystem::path& file);

std::string rows_to_csv(const std::vector<ReportRow>& rows);
std::string rows_to_json(const std::vector<ReportRow>& rows);

/// Multi-seed aggregation: per-column mean and sample standard deviation
/// over the rows that define the column.
struct AggregateReport {
    std::vector<std::string> inputs;
    std::optional<std::pair<double, double>> map5095, map50, map75, params, flops_g,
        size_mb, latency_ms;
};

AggregateReport aggregate_rows(const std::vector<ReportRow>& rows);
std::string aggregate_to_json(const AggregateReport& agg);
std::string aggregate_to_csv(const AggregateReport& agg);

}  // namespace dunedetect
