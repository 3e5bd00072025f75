#include "hsv/bootstrap/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

#include "hsv/core/rng.hpp"
#include "hsv/error.hpp"
#include "hsv/projector/angles.hpp"

namespace hsv::bootstrap {

std::string_view comparison_name(ComparisonKind kind) {
    switch (kind) {
        case ComparisonKind::subset_vs_ground_truth: return "subset_vs_ground_truth";
        case ComparisonKind::subset_vs_fullset: return "subset_vs_fullset";
        case ComparisonKind::cross_validation_interlaced: return "cross_validation_interlaced";
        case ComparisonKind::cross_validation_plain: return "cross_validation_plain";
        case ComparisonKind::fullset_vs_ground_truth: return "fullset_vs_ground_truth";
    }
    return "?";
}

ComparisonKind comparison_from_name(std::string_view name) {
    for (auto k : {ComparisonKind::subset_vs_ground_truth, ComparisonKind::subset_vs_fullset,
                   ComparisonKind::cross_validation_interlaced,
                   ComparisonKind::cross_validation_plain, ComparisonKind::fullset_vs_ground_truth}) {
        if (comparison_name(k) == name) return k;
    }
    throw DomainError("unknown comparison kind '" + std::string(name) + "'");
}

std::vector<SubsetSpec> sample_projection_subsets(std::uint32_t count, std::uint32_t n_subsets,
                                                  std::uint64_t master_seed) {
    if (count == 1) {
        throw SamplingError("projection subsets: i = 1 is excluded (single view has no shared 3D information)");
    }
    if (count == 0 || projector::kGridAngles % count != 0) {
        throw SamplingError("projection subsets: i = " + std::to_string(count) +
                            " does not divide the 16-angle grid");
    }
    if (n_subsets == 0) throw SamplingError("projection subsets: n_subsets must be >= 1");
    const std::uint32_t stride = projector::kGridAngles / count;
    const std::string role = "projection-subset/" + std::to_string(count);
    std::vector<SubsetSpec> out;
    out.reserve(n_subsets);
    for (std::uint32_t s = 0; s < n_subsets; ++s) {
        SubsetSpec spec;
        spec.regime = Regime::by_projections;
        spec.level = count;
        spec.subset_id = s;
        spec.seed = derive_seed(master_seed, role, s);
        Rng rng(spec.seed);
        const auto offset = static_cast<std::uint32_t>(rng.below(stride));
        for (std::uint32_t m = 0; m < count; ++m) spec.members.push_back(offset + m * stride);
        out.push_back(std::move(spec));
    }
    return out;
}

std::vector<SubsetSpec> sample_experiment_subsets(std::uint32_t k, std::uint32_t n_subsets,
                                                  std::uint32_t pool_size, std::uint64_t master_seed) {
    if (k == 0) throw SamplingError("experiment subsets: k must be >= 1");
    if (k > pool_size) {
        throw SamplingError("experiment subsets: k = " + std::to_string(k) + " exceeds pool size " +
                            std::to_string(pool_size));
    }
    if (n_subsets == 0) throw SamplingError("experiment subsets: n_subsets must be >= 1");
    const std::string role = "experiment-subset/" + std::to_string(k);
    std::vector<SubsetSpec> out;
    out.reserve(n_subsets);
    std::vector<std::uint32_t> pool(pool_size);
    for (std::uint32_t s = 0; s < n_subsets; ++s) {
        SubsetSpec spec;
        spec.regime = Regime::by_experiments;
        spec.level = k;
        spec.subset_id = s;
        spec.seed = derive_seed(master_seed, role, s);
        Rng rng(spec.seed);
        std::iota(pool.begin(), pool.end(), 0u);
        for (std::uint32_t j = 0; j < k; ++j) {  // partial Fisher-Yates
            const auto pick = j + static_cast<std::uint32_t>(rng.below(pool_size - j));
            std::swap(pool[j], pool[pick]);
        }
        spec.members.assign(pool.begin(), pool.begin() + k);
        std::sort(spec.members.begin(), spec.members.end());
        out.push_back(std::move(spec));
    }
    return out;
}

std::pair<Volume4D, Volume4D> interlace(const Volume4D& a, const Volume4D& b) {
    if (!(a.dims() == b.dims())) throw DimensionMismatch("interlace: volumes have different dimensions");
    if (a.dims().t < 2) throw DomainError("interlace: need at least 2 frames");
    const std::size_t pairs = a.dims().t / 2;
    std::vector<std::size_t> even, odd;
    for (std::size_t n = 0; n < pairs; ++n) {
        even.push_back(2 * n);
        odd.push_back(2 * n + 1);
    }
    return {a.select_frames(even), b.select_frames(odd)};
}

std::vector<PairRecord> draw_pairs(std::uint32_t n, std::uint32_t n_pairs, std::uint64_t master_seed) {
    if (n < 2) throw SamplingError("cross-validation needs at least 2 reconstructions");
    std::vector<PairRecord> out;
    out.reserve(n_pairs);
    for (std::uint32_t p = 0; p < n_pairs; ++p) {
        Rng rng(derive_seed(master_seed, "pair", p));
        auto a = static_cast<std::uint32_t>(rng.below(n));
        auto b = static_cast<std::uint32_t>(rng.below(n - 1));
        if (b >= a) ++b;
        out.push_back({p, std::min(a, b), std::max(a, b), 0});
    }
    return out;
}

CrossValidationResult cross_validate(std::span<const Volume4D> reconstructions,
                                     std::uint32_t n_pairs, bool interlaced,
                                     std::uint64_t master_seed,
                                     const metrics::MetricConfig& metric_config,
                                     CrossValidationContext context,
                                     std::span<const SubsetSpec> subsets) {
    if (reconstructions.size() < 2) {
        throw SamplingError("cross_validate: need at least 2 reconstructions");
    }
    for (const Volume4D& v : reconstructions) {
        if (!(v.dims() == reconstructions[0].dims())) {
            throw DimensionMismatch("cross_validate: reconstructions have different dimensions");
        }
    }
    if (!subsets.empty() && subsets.size() != reconstructions.size()) {
        throw DomainError("cross_validate: subsets must parallel reconstructions");
    }
    metric_config.validate();

    CrossValidationResult result;
    result.pairs = draw_pairs(static_cast<std::uint32_t>(reconstructions.size()), n_pairs, master_seed);
    if (!subsets.empty()) {
        for (PairRecord& p : result.pairs) {
            const auto& ma = subsets[p.a].members;
            const auto& mb = subsets[p.b].members;
            std::vector<std::uint32_t> shared;
            std::set_intersection(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(shared));
            p.member_overlap = static_cast<std::uint32_t>(shared.size());
        }
    }

    const auto kind = interlaced ? ComparisonKind::cross_validation_interlaced
                                 : ComparisonKind::cross_validation_plain;

    // Pairs whose two subsets have the same members as an earlier pair repeat its
    // values: reconstructions are deterministic in their inputs.
    std::vector<std::size_t> job_of(n_pairs);
    std::vector<std::size_t> jobs;  // representative pair per job
    {
        std::map<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>, std::size_t> seen;
        for (std::size_t p = 0; p < n_pairs; ++p) {
            const PairRecord& pr = result.pairs[p];
            if (subsets.empty()) {
                job_of[p] = jobs.size();
                jobs.push_back(p);
                continue;
            }
            auto [it, inserted] = seen.try_emplace({subsets[pr.a].members, subsets[pr.b].members}, jobs.size());
            if (inserted) jobs.push_back(p);
            job_of[p] = it->second;
        }
    }

    std::vector<std::array<double, 6>> job_values(jobs.size());
    std::exception_ptr failure;
    const auto count = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long j = 0; j < count; ++j) {
        try {
            const PairRecord& pr = result.pairs[jobs[static_cast<std::size_t>(j)]];
            metrics::MetricValues values;
            if (interlaced) {
                const auto [a, b] = interlace(reconstructions[pr.a], reconstructions[pr.b]);
                values = metrics::evaluate_all(a, b, metric_config);
            } else {
                values = metrics::evaluate_all(reconstructions[pr.a], reconstructions[pr.b], metric_config);
            }
            job_values[static_cast<std::size_t>(j)] = values.values;
        } catch (...) {
#pragma omp critical(hsv_cross_validate_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    result.reports.resize(n_pairs);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        metrics::MetricReport& r = result.reports[p];
        r.experiment_id = context.experiment_id;
        r.comparison_kind = std::string(comparison_name(kind));
        r.level = context.level;
        r.subset_id = -1;
        r.pair_id = result.pairs[p].pair_id;
        r.values = job_values[job_of[p]];
    }
    return result;
}

const CellStats* StatsSummary::find(std::string_view kind, std::uint32_t level,
                                    metrics::MetricKind m) const {
    for (const CellStats& c : cells) {
        if (c.comparison_kind == kind && c.level == level && c.metric == m) return &c;
    }
    return nullptr;
}

const CellStats& StatsSummary::at(std::string_view kind, std::uint32_t level,
                                  metrics::MetricKind m) const {
    const CellStats* c = find(kind, level, m);
    if (c == nullptr) {
        throw DomainError("summary has no cell for " + std::string(kind) + " level " +
                          std::to_string(level) + " " + std::string(metrics::metric_name(m)));
    }
    return *c;
}

bool is_converged(double mean, double std, std::uint32_t n_samples, double threshold) {
    if (n_samples < 2 || std::isnan(std)) return false;
    if (std == 0.0) return true;
    if (mean == 0.0) return false;
    return std / std::abs(mean) < threshold;
}

StatsSummary aggregate(std::span<const metrics::MetricReport> reports, double convergence_threshold) {
    if (reports.empty()) throw DomainError("aggregate: no reports");
    using Key = std::tuple<std::string, std::uint32_t, std::size_t>;
    std::map<Key, std::vector<double>> values;
    std::map<Key, std::pair<std::uint32_t, std::uint32_t>> excluded;  // (infinite, failed)
    for (const auto& r : reports) {
        for (std::size_t m = 0; m < metrics::kAllMetrics.size(); ++m) {
            const Key key{r.comparison_kind, r.level, m};
            const double v = r.values[m];
            auto& ex = excluded[key];
            if (std::isnan(v)) {
                ++ex.second;
            } else if (std::isinf(v)) {
                ++ex.first;
            } else {
                values[key].push_back(v);
            }
        }
    }

    StatsSummary summary;
    for (const auto& [key, ex] : excluded) {
        CellStats c;
        c.comparison_kind = std::get<0>(key);
        c.level = std::get<1>(key);
        c.metric = metrics::kAllMetrics[std::get<2>(key)];
        c.n_infinite = ex.first;
        c.n_failed = ex.second;
        auto it = values.find(key);
        std::vector<double> v = it == values.end() ? std::vector<double>{} : it->second;
        std::sort(v.begin(), v.end());
        c.n_samples = static_cast<std::uint32_t>(v.size());
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (v.empty()) {
            c.mean = nan;
            c.std = nan;
        } else {
            double sum = 0.0;
            for (double x : v) sum += x;
            c.mean = sum / double(v.size());
            if (v.size() >= 2) {
                double ss = 0.0;
                for (double x : v) ss += (x - c.mean) * (x - c.mean);
                c.std = std::sqrt(ss / double(v.size() - 1));
            } else {
                c.std = nan;
            }
        }
        c.converged = is_converged(c.mean, c.std, c.n_samples, convergence_threshold);
        summary.cells.push_back(std::move(c));
    }
    return summary;
}

void write_summary_csv(const StatsSummary& summary, std::ostream& out) {
    out << kSummaryHeader << '\n';
    for (const CellStats& c : summary.cells) {
        out << c.comparison_kind << ',' << c.level << ',' << metrics::metric_name(c.metric) << ','
            << metrics::format_number(c.mean) << ',' << metrics::format_number(c.std) << ','
            << c.n_samples << ',' << c.n_infinite << ',' << c.n_failed << ','
            << (c.converged ? 1 : 0) << '\n';
    }
}

StatsSummary read_summary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSummaryHeader) {
        throw FormatError("summary CSV: missing or unexpected header", 0);
    }
    std::uint64_t offset = line.size() + 1;
    StatsSummary summary;
    while (std::getline(in, line)) {
        if (line.empty()) {
            offset += 1;
            continue;
        }
        const auto cells = metrics::split_csv_line(line);
        if (cells.size() != 9) throw FormatError("summary CSV: expected 9 columns", offset);
        try {
            CellStats c;
            c.comparison_kind = cells[0];
            c.level = static_cast<std::uint32_t>(std::stoul(cells[1]));
            c.metric = metrics::metric_from_name(cells[2]);
            c.mean = metrics::parse_number(cells[3]);
            c.std = metrics::parse_number(cells[4]);
            c.n_samples = static_cast<std::uint32_t>(std::stoul(cells[5]));
            c.n_infinite = static_cast<std::uint32_t>(std::stoul(cells[6]));
            c.n_failed = static_cast<std::uint32_t>(std::stoul(cells[7]));
            c.converged = cells[8] == "1";
            summary.cells.push_back(std::move(c));
        } catch (const std::exception& e) {
            throw FormatError(std::string("summary CSV: ") + e.what(), offset);
        }
        offset += line.size() + 1;
    }
    return summary;
}

}  // namespace hsv::bootstrap
