#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>

#include "hsv/bootstrap/bootstrap.hpp"
#include "hsv/metrics/metrics.hpp"

namespace hsv::harness {

/// One panel per metric with mean +/- std against level for the subset-vs-truth,
/// subset-vs-fullset and cross-validation series, and a dashed horizontal line for
/// fullset_vs_ground_truth. MSE and DSSIM use a log axis. Throws DomainError when
/// the summary has no subset cells.
std::string summary_svg(const bootstrap::StatsSummary& summary);

using LabelledCurve = std::pair<std::string, metrics::FhcCurve>;

/// Correlation curves with their half-bit thresholds drawn dashed.
std::string fhc_svg(std::span<const LabelledCurve> curves);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hsv::harness
