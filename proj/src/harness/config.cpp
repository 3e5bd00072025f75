#include "hsv/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hsv/error.hpp"
#include "hsv/metrics/report.hpp"

namespace hsv::harness {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Bad {
    std::string message;
};

template <class T>
T parse_integer(const std::string& v) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw Bad{"expected an integer, got '" + v + "'"};
    return out;
}

double parse_real(const std::string& v) {
    try {
        return metrics::parse_number(v);
    } catch (const Error&) {
        throw Bad{"expected a number, got '" + v + "'"};
    }
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Bad{"expected true or false, got '" + v + "'"};
}

std::vector<std::uint32_t> parse_list(const std::string& v) {
    std::vector<std::uint32_t> out;
    for (const auto& part : metrics::split_csv_line(v)) out.push_back(parse_integer<std::uint32_t>(trim(part)));
    return out;
}

std::string join(const std::vector<std::uint32_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

phantom::Axis parse_axis(const std::string& v) {
    if (v == "x") return phantom::Axis::x;
    if (v == "y") return phantom::Axis::y;
    if (v == "z") return phantom::Axis::z;
    throw Bad{"expected x, y or z, got '" + v + "'"};
}

std::string axis_name(phantom::Axis a) {
    return a == phantom::Axis::x ? "x" : (a == phantom::Axis::y ? "y" : "z");
}

struct Field {
    std::function<void(StudyConfig&, const std::string&)> set;
    std::function<std::string(const StudyConfig&)> get;
};

std::string num(double v) { return metrics::format_number(v); }

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["study.regime"] = {[](StudyConfig& c, const std::string& v) {
                                 if (v == "sparse") c.regime = StudyRegime::sparse;
                                 else if (v == "ultra_sparse") c.regime = StudyRegime::ultra_sparse;
                                 else throw Bad{"expected sparse or ultra_sparse, got '" + v + "'"};
                             },
                             [](const StudyConfig& c) {
                                 return std::string(c.regime == StudyRegime::sparse ? "sparse" : "ultra_sparse");
                             }};
        t["study.levels"] = {[](StudyConfig& c, const std::string& v) { c.levels = parse_list(v); },
                             [](const StudyConfig& c) { return join(c.levels); }};
        t["study.n_subsets"] = {[](StudyConfig& c, const std::string& v) { c.n_subsets = parse_integer<std::uint32_t>(v); },
                                [](const StudyConfig& c) { return std::to_string(c.n_subsets); }};
        t["study.n_pairs"] = {[](StudyConfig& c, const std::string& v) { c.n_pairs = parse_integer<std::uint32_t>(v); },
                              [](const StudyConfig& c) { return std::to_string(c.n_pairs); }};
        t["study.interlaced"] = {[](StudyConfig& c, const std::string& v) { c.interlaced = parse_bool(v); },
                                 [](const StudyConfig& c) { return std::string(c.interlaced ? "true" : "false"); }};
        t["study.plain_cross_validation"] = {
            [](StudyConfig& c, const std::string& v) { c.plain_cross_validation = parse_bool(v); },
            [](const StudyConfig& c) { return std::string(c.plain_cross_validation ? "true" : "false"); }};
        t["study.seed"] = {[](StudyConfig& c, const std::string& v) { c.master_seed = parse_integer<std::uint64_t>(v); },
                           [](const StudyConfig& c) { return std::to_string(c.master_seed); }};
        t["study.workers"] = {[](StudyConfig& c, const std::string& v) { c.workers = parse_integer<std::uint32_t>(v); },
                              [](const StudyConfig& c) { return std::to_string(c.workers); }};
        t["study.output"] = {[](StudyConfig& c, const std::string& v) {
                                 if (v.empty()) throw Bad{"output directory must not be empty"};
                                 c.output = v;
                             },
                             [](const StudyConfig& c) { return c.output.string(); }};
        t["study.validation_variation"] = {
            [](StudyConfig& c, const std::string& v) { c.validation_variation = parse_real(v); },
            [](const StudyConfig& c) { return num(c.validation_variation); }};
        t["study.validation_row"] = {
            [](StudyConfig& c, const std::string& v) { c.validation_row = parse_integer<std::uint32_t>(v); },
            [](const StudyConfig& c) { return std::to_string(c.validation_row); }};
        t["study.save_subset_reconstructions"] = {
            [](StudyConfig& c, const std::string& v) { c.save_subset_reconstructions = parse_bool(v); },
            [](const StudyConfig& c) { return std::string(c.save_subset_reconstructions ? "true" : "false"); }};

        t["phantom.n_experiments"] = {
            [](StudyConfig& c, const std::string& v) { c.ensemble.n_experiments = parse_integer<std::uint32_t>(v); },
            [](const StudyConfig& c) { return std::to_string(c.ensemble.n_experiments); }};
        t["phantom.variation"] = {
            [](StudyConfig& c, const std::string& v) { c.ensemble.variation_fraction = parse_real(v); },
            [](const StudyConfig& c) { return num(c.ensemble.variation_fraction); }};
        t["phantom.dims"] = {[](StudyConfig& c, const std::string& v) {
                                 const auto d = parse_list(v);
                                 if (d.size() != 4) throw Bad{"expected T,X,Y,Z"};
                                 c.ensemble.dims = {d[0], d[1], d[2], d[3]};
                             },
                             [](const StudyConfig& c) {
                                 const auto& d = c.ensemble.dims;
                                 return join({d.t, d.x, d.y, d.z});
                             }};
        t["phantom.spacing_dx"] = {[](StudyConfig& c, const std::string& v) { c.ensemble.spacing_dx = parse_real(v); },
                                   [](const StudyConfig& c) { return num(c.ensemble.spacing_dx); }};
        t["phantom.frame_dt"] = {[](StudyConfig& c, const std::string& v) { c.ensemble.frame_dt = parse_real(v); },
                                 [](const StudyConfig& c) { return num(c.ensemble.frame_dt); }};
        t["phantom.radius_a"] = {[](StudyConfig& c, const std::string& v) { c.ensemble.base_params.radius_a = parse_real(v); },
                                 [](const StudyConfig& c) { return num(c.ensemble.base_params.radius_a); }};
        t["phantom.radius_b"] = {[](StudyConfig& c, const std::string& v) { c.ensemble.base_params.radius_b = parse_real(v); },
                                 [](const StudyConfig& c) { return num(c.ensemble.base_params.radius_b); }};
        t["phantom.speed"] = {[](StudyConfig& c, const std::string& v) { c.ensemble.base_params.speed = parse_real(v); },
                              [](const StudyConfig& c) { return num(c.ensemble.base_params.speed); }};
        t["phantom.axis"] = {[](StudyConfig& c, const std::string& v) { c.ensemble.base_params.approach_axis = parse_axis(v); },
                             [](const StudyConfig& c) { return axis_name(c.ensemble.base_params.approach_axis); }};
        t["phantom.blend_width"] = {
            [](StudyConfig& c, const std::string& v) { c.ensemble.base_params.blend_width = parse_real(v); },
            [](const StudyConfig& c) { return num(c.ensemble.base_params.blend_width); }};
        t["phantom.intensity_peak"] = {
            [](StudyConfig& c, const std::string& v) { c.ensemble.base_params.intensity_peak = parse_real(v); },
            [](const StudyConfig& c) { return num(c.ensemble.base_params.intensity_peak); }};
        t["phantom.merge_frame_fraction"] = {
            [](StudyConfig& c, const std::string& v) { c.ensemble.base_params.merge_frame_fraction = parse_real(v); },
            [](const StudyConfig& c) { return num(c.ensemble.base_params.merge_frame_fraction); }};

        t["solver.n_iterations"] = {
            [](StudyConfig& c, const std::string& v) { c.solver.n_iterations = parse_integer<std::uint32_t>(v); },
            [](const StudyConfig& c) { return std::to_string(c.solver.n_iterations); }};
        t["solver.relaxation"] = {[](StudyConfig& c, const std::string& v) { c.solver.relaxation = parse_real(v); },
                                  [](const StudyConfig& c) { return num(c.solver.relaxation); }};
        t["solver.nonneg_clamp"] = {[](StudyConfig& c, const std::string& v) { c.solver.nonneg_clamp = parse_bool(v); },
                                    [](const StudyConfig& c) { return std::string(c.solver.nonneg_clamp ? "true" : "false"); }};
        t["solver.stop_tol"] = {[](StudyConfig& c, const std::string& v) { c.solver.stop_tol = parse_real(v); },
                                [](const StudyConfig& c) { return num(c.solver.stop_tol); }};

        t["metrics.nmi_bins"] = {[](StudyConfig& c, const std::string& v) { c.metrics.nmi_bins = parse_integer<std::uint32_t>(v); },
                                 [](const StudyConfig& c) { return std::to_string(c.metrics.nmi_bins); }};
        t["metrics.nmi_variant"] = {[](StudyConfig& c, const std::string& v) {
                                        if (v == "joint_ratio") c.metrics.nmi_variant = metrics::NmiVariant::joint_ratio;
                                        else if (v == "geometric_mean") c.metrics.nmi_variant = metrics::NmiVariant::geometric_mean;
                                        else throw Bad{"expected joint_ratio or geometric_mean, got '" + v + "'"};
                                    },
                                    [](const StudyConfig& c) {
                                        return std::string(c.metrics.nmi_variant == metrics::NmiVariant::joint_ratio
                                                               ? "joint_ratio" : "geometric_mean");
                                    }};
        t["metrics.ssim_window_spatial"] = {
            [](StudyConfig& c, const std::string& v) { c.metrics.ssim_window_spatial = parse_integer<std::uint32_t>(v); },
            [](const StudyConfig& c) { return std::to_string(c.metrics.ssim_window_spatial); }};
        t["metrics.ssim_window_temporal"] = {
            [](StudyConfig& c, const std::string& v) { c.metrics.ssim_window_temporal = parse_integer<std::uint32_t>(v); },
            [](const StudyConfig& c) { return std::to_string(c.metrics.ssim_window_temporal); }};
        t["metrics.fhc_shells"] = {
            [](StudyConfig& c, const std::string& v) { c.metrics.fhc_shells = parse_integer<std::uint32_t>(v); },
            [](const StudyConfig& c) { return std::to_string(c.metrics.fhc_shells); }};
        t["metrics.psnr_peak"] = {[](StudyConfig& c, const std::string& v) {
                                      if (v == "auto") c.metrics.psnr_peak.reset();
                                      else c.metrics.psnr_peak = parse_real(v);
                                  },
                                  [](const StudyConfig& c) {
                                      return c.metrics.psnr_peak ? num(*c.metrics.psnr_peak) : std::string("auto");
                                  }};
        t["metrics.convergence_threshold"] = {
            [](StudyConfig& c, const std::string& v) { c.convergence_threshold = parse_real(v); },
            [](const StudyConfig& c) { return num(c.convergence_threshold); }};
        return t;
    }();
    return table;
}

void assign(StudyConfig& config, const std::string& key, const std::string& value, std::uint32_t line) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown key '" + key + "'", line);
    try {
        it->second.set(config, value);
    } catch (const Bad& b) {
        throw ConfigError(key + ": " + b.message, line);
    }
}

}  // namespace

void StudyConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m, 0); };
    if (levels.empty()) fail("study.levels must not be empty");
    for (std::uint32_t level : levels) {
        if (regime == StudyRegime::sparse) {
            if (level < 2 || level > 16 || 16 % level != 0) {
                fail("study.levels: sparse levels must divide 16 and be >= 2, got " + std::to_string(level));
            }
        } else if (level < 1 || level > ensemble.n_experiments) {
            fail("study.levels: ultra-sparse levels must be in [1, phantom.n_experiments], got " +
                 std::to_string(level));
        }
    }
    if (n_subsets < 1) fail("study.n_subsets must be >= 1");
    if ((interlaced || plain_cross_validation) && n_subsets < 2) {
        fail("study.n_subsets must be >= 2 for cross-validation");
    }
    if (!(validation_variation >= 0.0) || validation_variation >= 1.0) {
        fail("study.validation_variation must be in [0, 1)");
    }
    if (validation_row < 1 || validation_row > 16) fail("study.validation_row must be in [1, 16]");
    if (regime == StudyRegime::ultra_sparse && ensemble.n_experiments > 16) {
        fail("phantom.n_experiments must be <= 16 in the ultra-sparse regime");
    }
    if (!(convergence_threshold > 0.0)) fail("metrics.convergence_threshold must be > 0");
    if (ensemble.dims.t < 2) fail("phantom.dims: need at least 2 frames");
    try {
        ensemble.validate();
        solver.validate();
        metrics.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(e.what());
    }
}

StudyConfig default_config(StudyRegime regime) {
    StudyConfig c;
    c.regime = regime;
    if (regime == StudyRegime::ultra_sparse) {
        c.levels = {1, 2, 4, 8};
        c.ensemble.n_experiments = 16;
    }
    return c;
}

void apply_config(StudyConfig& config, std::istream& in) {
    std::string raw;
    std::uint32_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key = trim(text.substr(0, eq));
        if (key.empty()) throw ConfigError("missing key before '='", line);
        assign(config, key, trim(text.substr(eq + 1)), line);
    }
}

void apply_override(StudyConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value", 0);
    assign(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), 0);
}

StudyConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string(), 0);
    StudyConfig config;
    apply_config(config, in);
    return config;
}

std::string to_config_text(const StudyConfig& config) {
    std::ostringstream out;
    for (const auto& [key, field] : fields()) out << key << " = " << field.get(config) << '\n';
    return out.str();
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, field] : fields()) keys.push_back(key);
    return keys;
}

}  // namespace hsv::harness
