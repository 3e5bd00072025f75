// hsv: command-line driver for phantoms, projection, reconstruction, metrics and studies.
#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsv/core/volume_io.hpp"
#include "hsv/error.hpp"
#include "hsv/harness/config.hpp"
#include "hsv/harness/plot.hpp"
#include "hsv/harness/study.hpp"
#include "hsv/metrics/report.hpp"
#include "hsv/phantom/phantom.hpp"
#include "hsv/projector/angles.hpp"
#include "hsv/projector/projection_io.hpp"
#include "hsv/projector/projector.hpp"
#include "hsv/reconstruct/sirt.hpp"

namespace fs = std::filesystem;
using namespace hsv;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPipeline = 3;

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> workers;
    std::string out;
};

void add_common(CLI::App* app, Common& c, bool with_out = true) {
    app->add_option("--config,-c", c.config_path, "config file (key = value lines)");
    app->add_option("--set,-s", c.overrides, "override a config key, key=value (repeatable)");
    app->add_option("--seed", c.seed, "master seed (env HSV_SEED)");
    app->add_option("--workers,-j", c.workers, "worker threads, 0 for all (env HSV_WORKERS)");
    if (with_out) app->add_option("--out,-o", c.out, "output path");
}

template <class T>
std::optional<T> env_number(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long n = std::stoull(v, &used);
        if (used != std::string(v).size()) throw std::invalid_argument(v);
        return static_cast<T>(n);
    } catch (const std::exception&) {
        throw ConfigError(std::string(name) + " must be a non-negative integer, got '" + v + "'", 0);
    }
}

harness::StudyConfig resolve(const Common& c) {
    harness::StudyConfig cfg = c.config_path.empty() ? harness::StudyConfig{} : harness::load_config(c.config_path);
    for (const auto& o : c.overrides) harness::apply_override(cfg, o);
    if (auto s = c.seed ? c.seed : env_number<std::uint64_t>("HSV_SEED")) cfg.master_seed = *s;
    if (auto w = c.workers ? c.workers : env_number<std::uint32_t>("HSV_WORKERS")) cfg.workers = *w;
    return cfg;
}

void apply_workers(const harness::StudyConfig& cfg) {
    if (cfg.workers > 0) omp_set_num_threads(static_cast<int>(cfg.workers));
}

int cmd_phantom(const Common& c) {
    auto cfg = resolve(c);
    if (!c.out.empty()) cfg.output = c.out;
    cfg.validate();
    apply_workers(cfg);
    const auto spec = harness::study_ensemble(cfg);
    fs::create_directories(cfg.output);
    const auto ensemble = phantom::generate_ensemble(spec);
    for (std::size_t e = 0; e < ensemble.size(); ++e) {
        char name[32];
        std::snprintf(name, sizeof name, "experiment_%02zu.vol", e + 1);
        write_volume(ensemble[e], cfg.output / name);
    }
    write_volume(phantom::generate_experiment(harness::validation_params(cfg), spec.dims, spec.spacing_dx,
                                              spec.frame_dt),
                 cfg.output / "validation.vol");
    std::cout << "wrote " << ensemble.size() + 1 << " volumes to " << cfg.output.string() << '\n';
    return 0;
}

struct ProjectArgs {
    std::string input;
    std::vector<double> angles;
    std::uint32_t count = 0;
    std::uint32_t offset = 0;
    std::uint32_t table_row = 0;
    bool unknown_geometry = false;
    std::uint32_t experiment_id = 0;
};

int cmd_project(const Common& c, const ProjectArgs& a) {
    const auto cfg = resolve(c);
    apply_workers(cfg);
    if (c.out.empty()) throw ConfigError("project: --out is required", 0);
    std::vector<double> angles = a.angles;
    if (a.table_row > 0) {
        angles = projector::ultra_sparse_angles(a.table_row);
    } else if (angles.empty()) {
        angles = projector::evenly_spaced_angles(a.count > 0 ? a.count : projector::kGridAngles, a.offset);
    }
    const auto volume = read_volume(fs::path(a.input));
    const auto set = projector::acquire(volume, angles, !a.unknown_geometry, a.experiment_id);
    projector::write_projections(set, fs::path(c.out));
    std::cout << "wrote " << set.frames << " x " << set.n_angles() << " images to " << c.out << '\n';
    return 0;
}

struct ReconstructArgs {
    std::vector<std::string> inputs;
    std::uint32_t depth = 0;
};

int cmd_reconstruct(const Common& c, const ReconstructArgs& a) {
    const auto cfg = resolve(c);
    cfg.solver.validate();
    apply_workers(cfg);
    if (c.out.empty()) throw ConfigError("reconstruct: --out is required", 0);
    std::vector<projector::ProjectionSet> sets;
    for (const auto& p : a.inputs) sets.push_back(projector::read_projections(fs::path(p)));
    const auto& first = sets.front();
    const Dims4 dims{first.frames, a.depth > 0 ? a.depth : first.detector_u, first.detector_u, first.detector_v};
    const reconstruct::SirtReconstructor sirt(cfg.solver);
    const auto volume = sirt.reconstruct(sets, dims, cfg.ensemble.spacing_dx, cfg.ensemble.frame_dt);
    write_volume(volume, fs::path(c.out));
    std::cout << "wrote reconstruction to " << c.out << '\n';
    return 0;
}

int cmd_metrics(const Common& c, const std::string& a_path, const std::string& b_path, const std::string& fhc_out) {
    const auto cfg = resolve(c);
    cfg.metrics.validate();
    apply_workers(cfg);
    const auto a = read_volume(fs::path(a_path));
    const auto b = read_volume(fs::path(b_path));
    const auto values = metrics::evaluate_all(a, b, cfg.metrics);
    for (std::size_t k = 0; k < metrics::kAllMetrics.size(); ++k) {
        std::cout << metrics::metric_name(metrics::kAllMetrics[k]) << ' ' << metrics::format_number(values.values[k]);
        if (!values.errors[k].empty()) std::cout << "  # " << values.errors[k];
        std::cout << '\n';
    }
    if (!fhc_out.empty() && values.fhc_curve) {
        std::ofstream out(fhc_out, std::ios::binary);
        metrics::write_fhc_csv(*values.fhc_curve, out);
    }
    return 0;
}

int cmd_study(const Common& c) {
    auto cfg = resolve(c);
    if (!c.out.empty()) cfg.output = c.out;
    const auto result = harness::run_study(cfg);
    std::cout << "comparison_kind,level,metric,mean,std,converged\n";
    for (const auto& cell : result.summary.cells) {
        std::cout << cell.comparison_kind << ',' << cell.level << ',' << metrics::metric_name(cell.metric) << ','
                  << metrics::format_number(cell.mean) << ',' << metrics::format_number(cell.std) << ','
                  << (cell.converged ? "yes" : "no") << '\n';
    }
    std::cout << "outputs in " << result.output.string() << '\n';
    return 0;
}

int cmd_plot(const Common& c, const std::string& reports_dir) {
    const fs::path dir(reports_dir);
    const fs::path out = c.out.empty() ? dir.parent_path() / "plots" : fs::path(c.out);
    std::ifstream in(dir / "summary.csv", std::ios::binary);
    if (!in) throw Error("cannot read " + (dir / "summary.csv").string());
    const auto summary = bootstrap::read_summary_csv(in);
    std::vector<fs::path> fhc_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("fhc_", 0) == 0 && entry.path().extension() == ".csv") fhc_files.push_back(entry.path());
    }
    std::sort(fhc_files.begin(), fhc_files.end());
    std::vector<harness::LabelledCurve> curves;
    for (const auto& p : fhc_files) {
        std::ifstream f(p, std::ios::binary);
        curves.emplace_back(p.stem().string().substr(4), metrics::read_fhc_csv(f));
    }
    fs::create_directories(out);
    harness::write_text(out / "summary.svg", harness::summary_svg(summary));
    if (!curves.empty()) harness::write_text(out / "fhc.svg", harness::fhc_svg(curves));
    std::cout << "wrote plots to " << out.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reference-free validation of sparse 4D reconstructions"};
    app.require_subcommand(1);
    Common common;

    auto* phantom_cmd = app.add_subcommand("phantom", "generate the phantom ensemble and validation volume");
    add_common(phantom_cmd, common);

    ProjectArgs pa;
    auto* project_cmd = app.add_subcommand("project", "forward-project a VOL4D file");
    add_common(project_cmd, common);
    project_cmd->add_option("input", pa.input, "VOL4D file")->required();
    project_cmd->add_option("--angles", pa.angles, "explicit angles in degrees")->delimiter(',');
    project_cmd->add_option("--count", pa.count, "evenly spaced views on the 16-angle grid");
    project_cmd->add_option("--offset", pa.offset, "grid offset index for --count");
    project_cmd->add_option("--table-row", pa.table_row, "four-view ultra-sparse row 1..16");
    project_cmd->add_flag("--unknown-geometry", pa.unknown_geometry, "mark orientations as unknown");
    project_cmd->add_option("--id", pa.experiment_id, "experiment id stored in the file");

    ReconstructArgs ra;
    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "SIRT reconstruction from PRJ4D files");
    add_common(reconstruct_cmd, common);
    reconstruct_cmd->add_option("inputs", ra.inputs, "PRJ4D files, pooled")->required();
    reconstruct_cmd->add_option("--depth", ra.depth, "grid extent along the beam (default: detector u)");

    std::string a_path, b_path, fhc_out;
    auto* metrics_cmd = app.add_subcommand("metrics", "all six metrics between two VOL4D files");
    add_common(metrics_cmd, common, false);
    metrics_cmd->add_option("reference", a_path, "reference volume")->required();
    metrics_cmd->add_option("candidate", b_path, "compared volume")->required();
    metrics_cmd->add_option("--fhc-out", fhc_out, "write the FHC curve CSV");

    auto* study_cmd = app.add_subcommand("study", "run a bootstrapped cross-validation study");
    add_common(study_cmd, common);

    std::string reports_dir;
    auto* plot_cmd = app.add_subcommand("plot", "render SVGs from a study's reports directory");
    add_common(plot_cmd, common);
    plot_cmd->add_option("reports", reports_dir, "reports directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*phantom_cmd) return cmd_phantom(common);
        if (*project_cmd) return cmd_project(common, pa);
        if (*reconstruct_cmd) return cmd_reconstruct(common, ra);
        if (*metrics_cmd) return cmd_metrics(common, a_path, b_path, fhc_out);
        if (*study_cmd) return cmd_study(common);
        if (*plot_cmd) return cmd_plot(common, reports_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPipeline;
    }
    return 0;
}
