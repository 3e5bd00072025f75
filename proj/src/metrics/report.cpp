#include "hsv/metrics/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "hsv/error.hpp"

namespace hsv::metrics {
namespace {

template <typename Int>
Int parse_int(const std::string& text, std::uint64_t offset) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw FormatError("CSV: expected integer, got '" + text + "'", offset);
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_number(const std::string& text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw DomainError("CSV: expected number, got '" + text + "'");
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void write_reports_csv(std::span<const MetricReport> reports, std::ostream& out) {
    out << kReportHeader << '\n';
    for (const MetricReport& r : reports) {
        out << r.experiment_id << ',' << r.comparison_kind << ',' << r.level << ',' << r.subset_id
            << ',' << r.pair_id;
        for (double v : r.values) out << ',' << format_number(v);
        out << '\n';
    }
}

std::vector<MetricReport> read_reports_csv(std::istream& in) {
    std::string line;
    std::uint64_t offset = 0;
    if (!std::getline(in, line) || line != kReportHeader) {
        throw FormatError("metric report CSV: missing or unexpected header", 0);
    }
    offset += line.size() + 1;
    std::vector<MetricReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            offset += 1;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 11) {
            throw FormatError("metric report CSV: expected 11 columns, got " +
                                  std::to_string(cells.size()),
                              offset);
        }
        MetricReport r;
        r.experiment_id = parse_int<std::uint32_t>(cells[0], offset);
        r.comparison_kind = cells[1];
        r.level = parse_int<std::uint32_t>(cells[2], offset);
        r.subset_id = parse_int<std::int64_t>(cells[3], offset);
        r.pair_id = parse_int<std::int64_t>(cells[4], offset);
        for (std::size_t k = 0; k < 6; ++k) {
            try {
                r.values[k] = parse_number(cells[5 + k]);
            } catch (const DomainError& e) {
                throw FormatError(e.what(), offset);
            }
        }
        out.push_back(std::move(r));
        offset += line.size() + 1;
    }
    return out;
}

void write_fhc_csv(const FhcCurve& curve, std::ostream& out) {
    out << kFhcHeader << '\n';
    for (std::size_t j = 0; j < curve.shell_centers.size(); ++j) {
        out << format_number(curve.shell_centers[j]) << ',' << format_number(curve.correlations[j])
            << ',' << format_number(curve.n_effective[j]) << ',' << format_number(curve.thresholds[j])
            << '\n';
    }
}

FhcCurve read_fhc_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kFhcHeader) {
        throw FormatError("FHC CSV: missing or unexpected header", 0);
    }
    std::uint64_t offset = line.size() + 1;
    FhcCurve curve;
    while (std::getline(in, line)) {
        if (line.empty()) {
            offset += 1;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) throw FormatError("FHC CSV: expected 4 columns", offset);
        try {
            curve.shell_centers.push_back(parse_number(cells[0]));
            curve.correlations.push_back(parse_number(cells[1]));
            curve.n_effective.push_back(parse_number(cells[2]));
            curve.thresholds.push_back(parse_number(cells[3]));
        } catch (const DomainError& e) {
            throw FormatError(e.what(), offset);
        }
        offset += line.size() + 1;
    }
    curve.resolution = crossing_resolution(curve);
    return curve;
}

}  // namespace hsv::metrics
