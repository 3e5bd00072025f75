#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hsv/metrics/metrics.hpp"

namespace hsv::metrics {

/// One row of the metric report table. subset_id / pair_id are -1 when not applicable.
struct MetricReport {
    std::uint32_t experiment_id = 0;
    std::string comparison_kind;
    std::uint32_t level = 0;
    std::int64_t subset_id = -1;
    std::int64_t pair_id = -1;
    std::array<double, 6> values{};  // indexed like kAllMetrics

    double operator[](MetricKind k) const { return values[static_cast<std::size_t>(k)]; }
    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

inline constexpr const char* kReportHeader =
    "experiment_id,comparison_kind,level,subset_id,pair_id,mse,psnr_db,dssim,nmi,ncc,fhc_resolution";
inline constexpr const char* kFhcHeader = "shell_center,correlation,n_effective,threshold";

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);
double parse_number(const std::string& text);

void write_reports_csv(std::span<const MetricReport> reports, std::ostream& out);
std::vector<MetricReport> read_reports_csv(std::istream& in);

void write_fhc_csv(const FhcCurve& curve, std::ostream& out);
/// Reads shells back; resolution is recomputed from the table.
FhcCurve read_fhc_csv(std::istream& in);

/// Splits one CSV line on commas (no quoting; the schemas never need it).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace hsv::metrics
