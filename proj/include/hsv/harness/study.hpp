#pragma once

#include <filesystem>
#include <vector>

#include "hsv/bootstrap/bootstrap.hpp"
#include "hsv/harness/config.hpp"
#include "hsv/metrics/report.hpp"
#include "hsv/phantom/phantom.hpp"

namespace hsv::harness {

struct StudyResult {
    bootstrap::StatsSummary summary;
    std::vector<metrics::MetricReport> reports;
    std::filesystem::path output;
    std::filesystem::path metrics_csv;
    std::filesystem::path summary_csv;
    std::filesystem::path pairs_csv;
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> fhc_csvs;
    std::vector<std::filesystem::path> plots;
};

/// Ensemble spec with the study's derived seed.
phantom::EnsembleSpec study_ensemble(const StudyConfig& config);

/// Parameters of the held-out validation experiment.
phantom::PhantomParams validation_params(const StudyConfig& config);

/// Runs the whole pipeline and writes the output tree:
///   volumes/          ground-truth ensemble and validation experiment (VOL4D)
///   projections/      acquired projection sets (PRJ4D)
///   reconstructions/  pseudo-reference, plus subset reconstructions if requested
///   reports/          metrics.csv, summary.csv, pairs.csv, fhc_*.csv, manifest.json
///   plots/            summary.svg, fhc.svg
/// Output is a pure function of the config. Failures are rethrown as StageError;
/// files written before the failure are kept.
StudyResult run_study(const StudyConfig& config);

}  // namespace hsv::harness
