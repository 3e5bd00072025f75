#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsv/core/volume4d.hpp"
#include "hsv/metrics/metrics.hpp"
#include "hsv/metrics/report.hpp"

namespace hsv::bootstrap {

enum class Regime { by_projections, by_experiments };

/// One bootstrap draw. For by_projections the members are indices on the
/// 16-angle grid; for by_experiments they are experiment pool indices.
struct SubsetSpec {
    Regime regime = Regime::by_projections;
    std::uint32_t level = 0;  // i or k
    std::vector<std::uint32_t> members;  // sorted, duplicate-free
    std::uint32_t subset_id = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const SubsetSpec&, const SubsetSpec&) = default;
};

enum class ComparisonKind {
    subset_vs_ground_truth,
    subset_vs_fullset,
    cross_validation_interlaced,
    cross_validation_plain,
    fullset_vs_ground_truth,  // baseline
};

std::string_view comparison_name(ComparisonKind kind);
ComparisonKind comparison_from_name(std::string_view name);

/// Evenly spaced cosets of the 16-angle grid with a uniformly random offset.
std::vector<SubsetSpec> sample_projection_subsets(std::uint32_t count, std::uint32_t n_subsets,
                                                  std::uint64_t master_seed);

/// k experiments drawn without replacement from [0, pool_size) per subset.
std::vector<SubsetSpec> sample_experiment_subsets(std::uint32_t k, std::uint32_t n_subsets,
                                                  std::uint32_t pool_size, std::uint64_t master_seed);

/// (a at frames 0, 2, 4, ...; b at frames 1, 3, 5, ...), truncated to equal length.
std::pair<Volume4D, Volume4D> interlace(const Volume4D& a, const Volume4D& b);

struct PairRecord {
    std::int64_t pair_id = 0;
    std::uint32_t a = 0;  // a < b
    std::uint32_t b = 0;
    std::uint32_t member_overlap = 0;  // shared subset members, 0 when subsets are not supplied
};

/// n_pairs unordered pairs of distinct indices in [0, n), drawn with replacement across pairs.
std::vector<PairRecord> draw_pairs(std::uint32_t n, std::uint32_t n_pairs, std::uint64_t master_seed);

struct CrossValidationContext {
    std::uint32_t experiment_id = 0;
    std::uint32_t level = 0;
};

struct CrossValidationResult {
    std::vector<metrics::MetricReport> reports;
    std::vector<PairRecord> pairs;
};

/// Evaluates all metrics on randomly drawn reconstruction pairs. `subsets`, when
/// given, must parallel `reconstructions`; it feeds the overlap ledger, and pairs
/// repeating an earlier pair's member lists reuse its values.
CrossValidationResult cross_validate(std::span<const Volume4D> reconstructions,
                                     std::uint32_t n_pairs, bool interlaced,
                                     std::uint64_t master_seed,
                                     const metrics::MetricConfig& metric_config,
                                     CrossValidationContext context = {},
                                     std::span<const SubsetSpec> subsets = {});

struct CellStats {
    std::string comparison_kind;
    std::uint32_t level = 0;
    metrics::MetricKind metric = metrics::MetricKind::mse;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (n - 1)
    std::uint32_t n_samples = 0;   // finite values used
    std::uint32_t n_infinite = 0;  // +/-inf sentinels, excluded from the moments
    std::uint32_t n_failed = 0;    // NaN (metric undefined for that pair)
    bool converged = false;
};

struct StatsSummary {
    std::vector<CellStats> cells;  // sorted by (comparison_kind, level, metric)

    const CellStats* find(std::string_view kind, std::uint32_t level, metrics::MetricKind m) const;
    const CellStats& at(std::string_view kind, std::uint32_t level, metrics::MetricKind m) const;
};

/// converged <=> std / |mean| < threshold (a zero spread counts as converged).
bool is_converged(double mean, double std, std::uint32_t n_samples, double threshold);

/// Per (comparison kind, level, metric) moments. Values inside a cell are
/// summed in sorted order, so the result is independent of report order.
StatsSummary aggregate(std::span<const metrics::MetricReport> reports,
                       double convergence_threshold = 0.01);

inline constexpr const char* kSummaryHeader =
    "comparison_kind,level,metric,mean,std,n_samples,n_infinite,n_failed,converged";

void write_summary_csv(const StatsSummary& summary, std::ostream& out);
StatsSummary read_summary_csv(std::istream& in);

}  // namespace hsv::bootstrap
