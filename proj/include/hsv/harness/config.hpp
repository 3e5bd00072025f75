#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsv/metrics/metrics.hpp"
#include "hsv/phantom/phantom.hpp"
#include "hsv/reconstruct/sirt.hpp"

namespace hsv::harness {

enum class StudyRegime { sparse, ultra_sparse };

struct StudyConfig {
    StudyRegime regime = StudyRegime::sparse;
    phantom::EnsembleSpec ensemble{};
    std::vector<std::uint32_t> levels = {2, 4, 8};
    std::uint32_t n_subsets = 20;
    std::uint32_t n_pairs = 100;
    bool interlaced = true;
    /// Also evaluate cross-validation without the temporal offset.
    bool plain_cross_validation = true;
    reconstruct::SolverConfig solver{};
    metrics::MetricConfig metrics{};
    double convergence_threshold = 0.01;
    std::uint64_t master_seed = 1;
    std::filesystem::path output = "hsv_study";
    std::uint32_t workers = 0;  // 0: OpenMP default
    double validation_variation = 0.05;
    /// Row of the four-view angle table whose views the held-out experiment is acquired at (ultra-sparse).
    std::uint32_t validation_row = 1;
    bool save_subset_reconstructions = false;

    /// Throws ConfigError (line 0) when a field is out of range.
    void validate() const;
};

/// Defaults for a regime: levels {2, 4, 8} with 8 experiments (sparse) or
/// levels {1, 2, 4, 8} with a 16-experiment pool (ultra-sparse).
StudyConfig default_config(StudyRegime regime);

// Config text: one `key = value` per line, `#` starts a comment, keys are dotted
// (study.levels, phantom.dims, solver.n_iterations, metrics.nmi_bins, ...).
// Later assignments win. Values start from the sparse defaults.

/// Applies every line of `in` on top of `config`. Unknown keys and bad values
/// raise ConfigError carrying the line number.
void apply_config(StudyConfig& config, std::istream& in);

/// Applies a single `key=value` override (line number 0 in errors).
void apply_override(StudyConfig& config, const std::string& assignment);

StudyConfig load_config(const std::filesystem::path& path);

/// Every known key with its current value, in a form apply_config accepts.
std::string to_config_text(const StudyConfig& config);

std::vector<std::string> known_keys();

}  // namespace hsv::harness
