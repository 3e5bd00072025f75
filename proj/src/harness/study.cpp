#include "hsv/harness/study.hpp"

#include <omp.h>

#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include "hsv/core/rng.hpp"
#include "hsv/core/volume_io.hpp"
#include "hsv/error.hpp"
#include "hsv/harness/plot.hpp"
#include "hsv/phantom/phantom.hpp"
#include "hsv/projector/angles.hpp"
#include "hsv/projector/projection_io.hpp"
#include "hsv/projector/projector.hpp"
#include "json.hpp"

namespace hsv::harness {
namespace {

namespace fs = std::filesystem;
using Members = std::vector<std::uint32_t>;

template <class F>
auto in_stage(const char* stage, std::int64_t level, std::int64_t subset, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, level, subset, e.what());
    }
}

std::string padded(std::uint32_t v, int width = 2) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%0*u", width, v);
    return buf;
}

// Restores the OpenMP thread count on scope exit.
class WorkerScope {
public:
    explicit WorkerScope(std::uint32_t workers) : previous_(omp_get_max_threads()) {
        if (workers > 0) omp_set_num_threads(static_cast<int>(workers));
    }
    ~WorkerScope() { omp_set_num_threads(previous_); }
    WorkerScope(const WorkerScope&) = delete;
    WorkerScope& operator=(const WorkerScope&) = delete;

private:
    int previous_;
};

metrics::MetricReport make_report(std::uint32_t experiment_id, bootstrap::ComparisonKind kind,
                                  std::uint32_t level, std::int64_t subset_id,
                                  const std::array<double, 6>& values) {
    metrics::MetricReport r;
    r.experiment_id = experiment_id;
    r.comparison_kind = std::string(bootstrap::comparison_name(kind));
    r.level = level;
    r.subset_id = subset_id;
    r.values = values;
    return r;
}

void write_fhc(const fs::path& path, const metrics::FhcCurve& curve) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    metrics::write_fhc_csv(curve, out);
}

nlohmann::ordered_json params_json(const phantom::PhantomParams& p) {
    return {{"radius_a", p.radius_a}, {"radius_b", p.radius_b}, {"speed", p.speed}, {"seed", p.seed}};
}

}  // namespace

phantom::EnsembleSpec study_ensemble(const StudyConfig& config) {
    phantom::EnsembleSpec spec = config.ensemble;
    spec.master_seed = derive_seed(config.master_seed, "ensemble", 0);
    return spec;
}

phantom::PhantomParams validation_params(const StudyConfig& config) {
    return phantom::perturb(config.ensemble.base_params, config.validation_variation,
                            derive_seed(config.master_seed, "validation", 0));
}

StudyResult run_study(const StudyConfig& config) {
    config.validate();
    const WorkerScope workers(config.workers);
    const bool sparse = config.regime == StudyRegime::sparse;
    const Dims4 dims = config.ensemble.dims;
    const double dx = config.ensemble.spacing_dx, dt = config.ensemble.frame_dt;
    const std::uint64_t master = config.master_seed;

    StudyResult result;
    result.output = config.output;
    const fs::path volumes = config.output / "volumes", projections = config.output / "projections",
                   recon_dir = config.output / "reconstructions", reports = config.output / "reports",
                   plots = config.output / "plots";
    in_stage("setup", -1, -1, [&] {
        for (const auto& d : {volumes, projections, recon_dir, reports, plots}) fs::create_directories(d);
        return 0;
    });

    nlohmann::ordered_json manifest;
    manifest["regime"] = sparse ? "sparse" : "ultra_sparse";
    manifest["master_seed"] = master;
    {
        nlohmann::ordered_json cfg;
        std::istringstream text(to_config_text(config));
        std::string line;
        while (std::getline(text, line)) {
            const auto eq = line.find(" = ");
            cfg[line.substr(0, eq)] = line.substr(eq + 3);
        }
        manifest["config"] = cfg;
    }

    // Ground truth: training-like ensemble plus one held-out validation experiment.
    const phantom::EnsembleSpec spec = study_ensemble(config);
    const std::uint32_t validation_id = spec.n_experiments + 1;
    const auto ensemble_params = in_stage("phantom", -1, -1, [&] { return phantom::ensemble_params(spec); });
    const auto ensemble = in_stage("phantom", -1, -1, [&] { return phantom::generate_ensemble(spec); });
    const auto held_out = validation_params(config);
    const Volume4D truth = in_stage("phantom", -1, -1, [&] {
        try {
            return phantom::generate_experiment(held_out, dims, dx, dt);
        } catch (const Error& e) {
            throw GeometryError(std::string("validation experiment: ") + e.what());
        }
    });
    in_stage("phantom", -1, -1, [&] {
        for (std::uint32_t e = 0; e < spec.n_experiments; ++e) {
            write_volume(ensemble[e], volumes / ("experiment_" + padded(e + 1) + ".vol"));
        }
        write_volume(truth, volumes / "validation.vol");
        return 0;
    });

    // Acquisition.
    std::vector<projector::ProjectionSet> sets;
    projector::ProjectionSet validation_set;
    in_stage("project", -1, -1, [&] {
        for (std::uint32_t e = 0; e < spec.n_experiments; ++e) {
            const auto angles = sparse ? projector::evenly_spaced_angles(projector::kGridAngles, 0)
                                       : projector::ultra_sparse_angles(e + 1);
            sets.push_back(projector::acquire(ensemble[e], angles, sparse, e + 1));
            projector::write_projections(sets.back(), projections / ("experiment_" + padded(e + 1) + ".prj"));
        }
        const auto angles = sparse ? projector::evenly_spaced_angles(projector::kGridAngles, 0)
                                   : projector::ultra_sparse_angles(config.validation_row);
        validation_set = projector::acquire(truth, angles, sparse, validation_id);
        projector::write_projections(validation_set, projections / "validation.prj");
        return 0;
    });

    {
        auto& ex = manifest["experiments"];
        ex = nlohmann::ordered_json::array();
        for (std::uint32_t e = 0; e < spec.n_experiments; ++e) {
            auto j = params_json(ensemble_params[e]);
            j["experiment_id"] = e + 1;
            j["angles_deg"] = sets[e].angles_deg;
            j["geometry_known"] = sets[e].geometry_known;
            ex.push_back(j);
        }
        auto v = params_json(held_out);
        v["experiment_id"] = validation_id;
        v["angles_deg"] = validation_set.angles_deg;
        v["geometry_known"] = validation_set.geometry_known;
        manifest["validation"] = v;
    }

    const reconstruct::SirtReconstructor reconstructor(config.solver);
    manifest["reconstructor"] = reconstructor.name();

    // Pseudo-reference from every available projection.
    const Volume4D fullset = in_stage("reconstruct", -1, -1, [&] {
        std::vector<projector::ProjectionSet> all;
        if (sparse) {
            all.push_back(validation_set);
        } else {
            all = sets;
            all.push_back(validation_set);
        }
        Volume4D v = reconstruct::reconstruct_pseudo_reference(reconstructor, all, dims, dx, dt);
        write_volume(v, recon_dir / "fullset.vol");
        return v;
    });

    std::vector<metrics::MetricReport> all_reports;
    std::vector<LabelledCurve> fhc_curves;
    in_stage("evaluate", 0, -1, [&] {
        const auto values = metrics::evaluate_all(truth, fullset, config.metrics);
        all_reports.push_back(make_report(validation_id, bootstrap::ComparisonKind::fullset_vs_ground_truth, 0, -1,
                                          values.values));
        if (values.fhc_curve) {
            const fs::path p = reports / "fhc_fullset_vs_ground_truth.csv";
            write_fhc(p, *values.fhc_curve);
            result.fhc_csvs.push_back(p);
            fhc_curves.emplace_back("full set", *values.fhc_curve);
        }
        return 0;
    });

    std::ostringstream pairs_csv;
    pairs_csv << "level,comparison_kind,pair_id,a,b,member_overlap\n";
    auto& manifest_levels = manifest["levels"];
    manifest_levels = nlohmann::ordered_json::array();

    for (std::uint32_t level : config.levels) {
        const std::uint64_t subset_seed = derive_seed(master, "subsets", level);
        const std::uint64_t pair_seed = derive_seed(master, "pairs", level);
        const auto subsets = in_stage("sample", level, -1, [&] {
            return sparse ? bootstrap::sample_projection_subsets(level, config.n_subsets, subset_seed)
                          : bootstrap::sample_experiment_subsets(level, config.n_subsets, spec.n_experiments,
                                                                 subset_seed);
        });

        // One reconstruction per distinct member set; the reconstructor is deterministic.
        std::map<Members, std::size_t> unique_index;
        std::vector<Members> unique_members;
        std::vector<std::int64_t> first_subset;
        for (const auto& s : subsets) {
            if (unique_index.try_emplace(s.members, unique_members.size()).second) {
                unique_members.push_back(s.members);
                first_subset.push_back(s.subset_id);
            }
        }
        std::vector<Volume4D> unique_recons;
        for (std::size_t u = 0; u < unique_members.size(); ++u) {
            unique_recons.push_back(in_stage("reconstruct", level, first_subset[u], [&] {
                std::vector<projector::ProjectionSet> input;
                if (sparse) {
                    std::vector<std::size_t> positions(unique_members[u].begin(), unique_members[u].end());
                    input.push_back(validation_set.select_angles(positions));
                } else {
                    input.push_back(validation_set);
                    for (std::uint32_t m : unique_members[u]) input.push_back(sets[m]);
                }
                return reconstructor.reconstruct(input, dims, dx, dt);
            }));
        }

        std::vector<metrics::MetricValues> vs_truth(unique_recons.size()), vs_full(unique_recons.size());
        std::exception_ptr failure;
        std::int64_t failed_subset = -1;
        const auto count = static_cast<long>(unique_recons.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long u = 0; u < count; ++u) {
            try {
                vs_truth[u] = metrics::evaluate_all(truth, unique_recons[u], config.metrics);
                vs_full[u] = metrics::evaluate_all(fullset, unique_recons[u], config.metrics);
            } catch (...) {
#pragma omp critical(hsv_study_failure)
                if (!failure || first_subset[u] < failed_subset) {
                    failure = std::current_exception();
                    failed_subset = first_subset[u];
                }
            }
        }
        if (failure) {
            in_stage("evaluate", level, failed_subset, [&] {
                std::rethrow_exception(failure);
                return 0;
            });
        }

        for (const auto& s : subsets) {
            all_reports.push_back(make_report(validation_id, bootstrap::ComparisonKind::subset_vs_ground_truth,
                                              level, s.subset_id, vs_truth[unique_index[s.members]].values));
        }
        for (const auto& s : subsets) {
            all_reports.push_back(make_report(validation_id, bootstrap::ComparisonKind::subset_vs_fullset, level,
                                              s.subset_id, vs_full[unique_index[s.members]].values));
        }
        if (const auto& c = vs_truth[unique_index[subsets[0].members]].fhc_curve) {
            const fs::path p = reports / ("fhc_level_" + padded(level) + ".csv");
            write_fhc(p, *c);
            result.fhc_csvs.push_back(p);
            fhc_curves.emplace_back((sparse ? "i = " : "k = ") + std::to_string(level), *c);
        }

        if (config.save_subset_reconstructions) {
            in_stage("write", level, -1, [&] {
                for (const auto& s : subsets) {
                    write_volume(unique_recons[unique_index[s.members]],
                                 recon_dir / ("level_" + padded(level) + "_subset_" + padded(s.subset_id, 3) + ".vol"));
                }
                return 0;
            });
        }

        std::vector<Volume4D> recons;
        recons.reserve(subsets.size());
        for (const auto& s : subsets) recons.push_back(unique_recons[unique_index[s.members]]);
        for (bool interlaced : {true, false}) {
            if (interlaced ? !config.interlaced : !config.plain_cross_validation) continue;
            const auto cv = in_stage("cross_validate", level, -1, [&] {
                return bootstrap::cross_validate(recons, config.n_pairs, interlaced, pair_seed, config.metrics,
                                                 {validation_id, level}, subsets);
            });
            all_reports.insert(all_reports.end(), cv.reports.begin(), cv.reports.end());
            const auto kind = bootstrap::comparison_name(interlaced
                                                             ? bootstrap::ComparisonKind::cross_validation_interlaced
                                                             : bootstrap::ComparisonKind::cross_validation_plain);
            for (const auto& p : cv.pairs) {
                pairs_csv << level << ',' << kind << ',' << p.pair_id << ',' << p.a << ',' << p.b << ','
                          << p.member_overlap << '\n';
            }
        }

        nlohmann::ordered_json lj;
        lj["level"] = level;
        lj["subset_seed"] = subset_seed;
        lj["pair_seed"] = pair_seed;
        lj["distinct_subsets"] = unique_members.size();
        auto& sj = lj["subsets"];
        sj = nlohmann::ordered_json::array();
        for (const auto& s : subsets) {
            sj.push_back({{"subset_id", s.subset_id}, {"seed", s.seed}, {"members", s.members}});
        }
        manifest_levels.push_back(lj);
    }

    result.reports = all_reports;
    result.summary = in_stage("aggregate", -1, -1, [&] {
        return bootstrap::aggregate(all_reports, config.convergence_threshold);
    });

    in_stage("write", -1, -1, [&] {
        result.metrics_csv = reports / "metrics.csv";
        {
            std::ofstream out(result.metrics_csv, std::ios::binary);
            metrics::write_reports_csv(all_reports, out);
            if (!out) throw Error("cannot write " + result.metrics_csv.string());
        }
        result.summary_csv = reports / "summary.csv";
        {
            std::ofstream out(result.summary_csv, std::ios::binary);
            bootstrap::write_summary_csv(result.summary, out);
            if (!out) throw Error("cannot write " + result.summary_csv.string());
        }
        result.pairs_csv = reports / "pairs.csv";
        write_text(result.pairs_csv, pairs_csv.str());

        auto& outputs = manifest["outputs"];
        outputs = nlohmann::ordered_json::array();
        for (const auto& p : {result.metrics_csv, result.summary_csv, result.pairs_csv}) {
            outputs.push_back(fs::relative(p, config.output).generic_string());
        }
        for (const auto& p : result.fhc_csvs) outputs.push_back(fs::relative(p, config.output).generic_string());
        result.manifest = reports / "manifest.json";
        write_text(result.manifest, manifest.dump(2) + "\n");
        return 0;
    });

    in_stage("plot", -1, -1, [&] {
        result.plots.push_back(plots / "summary.svg");
        write_text(result.plots.back(), summary_svg(result.summary));
        result.plots.push_back(plots / "fhc.svg");
        write_text(result.plots.back(), fhc_svg(fhc_curves));
        return 0;
    });
    return result;
}

}  // namespace hsv::harness
