#include "hsv/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "hsv/error.hpp"

namespace hsv::harness {
namespace {

constexpr double kPanelW = 300, kPanelH = 220;
constexpr double kMarginL = 58, kMarginR = 12, kMarginT = 26, kMarginB = 34;

struct Series {
    const char* kind;
    const char* label;
    const char* color;
    const char* dash;  // empty for solid
    const char* marker;
};

const Series kSeries[] = {
    {"subset_vs_ground_truth", "subset vs truth", "#1f77b4", "", "circle"},
    {"subset_vs_fullset", "subset vs full set", "#e0a100", "8,3,2,3", "triangle"},
    {"cross_validation", "cross-validation", "#2ca02c", "2,3", "square"},
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

class Axis {
public:
    Axis(double lo, double hi, bool log_scale) : log_(log_scale) {
        if (log_) {
            lo_ = std::floor(std::log10(lo));
            hi_ = std::ceil(std::log10(hi));
            if (hi_ <= lo_) hi_ = lo_ + 1;
        } else {
            const double pad = hi > lo ? 0.08 * (hi - lo) : std::max(1e-3, 0.05 * std::abs(hi));
            lo_ = lo - pad;
            hi_ = hi + pad;
        }
    }
    double frac(double v) const { return ((log_ ? std::log10(v) : v) - lo_) / (hi_ - lo_); }
    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log_) {
            for (double e = lo_; e <= hi_ + 1e-9; ++e) t.push_back(std::pow(10.0, e));
        } else {
            for (int i = 0; i <= 4; ++i) t.push_back(lo_ + (hi_ - lo_) * i / 4);
        }
        return t;
    }
    bool usable(double v) const { return std::isfinite(v) && (!log_ || v > 0); }

private:
    bool log_;
    double lo_ = 0, hi_ = 1;
};

void marker(std::ostringstream& o, const char* shape, double x, double y, const char* color) {
    if (std::string(shape) == "circle") {
        o << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    } else if (std::string(shape) == "square") {
        o << "<rect x=\"" << fmt(x - 3.5) << "\" y=\"" << fmt(y - 3.5)
          << "\" width=\"7\" height=\"7\" fill=\"" << color << "\"/>\n";
    } else {
        o << "<polygon points=\"" << fmt(x) << ',' << fmt(y - 4.5) << ' ' << fmt(x - 4) << ',' << fmt(y + 3)
          << ' ' << fmt(x + 4) << ',' << fmt(y + 3) << "\" fill=\"" << color << "\"/>\n";
    }
}

}  // namespace

std::string summary_svg(const bootstrap::StatsSummary& summary) {
    const bool have_interlaced = std::any_of(summary.cells.begin(), summary.cells.end(), [](const auto& c) {
        return c.comparison_kind == "cross_validation_interlaced";
    });
    const std::string cv_kind = have_interlaced ? "cross_validation_interlaced" : "cross_validation_plain";
    auto resolve = [&](const std::string& kind) { return kind == "cross_validation" ? cv_kind : kind; };

    std::set<std::uint32_t> level_set;
    for (const auto& c : summary.cells) {
        for (const auto& s : kSeries) {
            if (c.comparison_kind == resolve(s.kind)) level_set.insert(c.level);
        }
    }
    if (level_set.empty()) throw DomainError("plot: summary has no subset or cross-validation cells");
    const std::vector<std::uint32_t> levels(level_set.begin(), level_set.end());

    const int cols = 3, rows = 2;
    const double width = cols * kPanelW, height = rows * kPanelH + 28;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t m = 0; m < metrics::kAllMetrics.size(); ++m) {
        const auto metric = metrics::kAllMetrics[m];
        const bool log_scale = metric == metrics::MetricKind::mse || metric == metrics::MetricKind::dssim;
        const double ox = double(m % cols) * kPanelW, oy = double(m / cols) * kPanelH;
        const double pw = kPanelW - kMarginL - kMarginR, ph = kPanelH - kMarginT - kMarginB;

        const bootstrap::CellStats* baseline = summary.find("fullset_vs_ground_truth", 0, metric);
        std::vector<double> span_values;
        auto usable_raw = [&](double v) { return std::isfinite(v) && (!log_scale || v > 0); };
        for (const auto& s : kSeries) {
            for (auto level : levels) {
                const auto* c = summary.find(resolve(s.kind), level, metric);
                if (c == nullptr || !std::isfinite(c->mean)) continue;
                for (double v : {c->mean, c->mean - c->std, c->mean + c->std}) {
                    if (usable_raw(v)) span_values.push_back(v);
                }
            }
        }
        if (baseline != nullptr && usable_raw(baseline->mean)) span_values.push_back(baseline->mean);
        double lo = 0, hi = 1;
        if (!span_values.empty()) {
            lo = *std::min_element(span_values.begin(), span_values.end());
            hi = *std::max_element(span_values.begin(), span_values.end());
        }
        const Axis axis(lo, hi, log_scale);
        auto px = [&](std::size_t i) {
            return ox + kMarginL + (levels.size() == 1 ? 0.5 : double(i) / double(levels.size() - 1)) * pw;
        };
        auto py = [&](double v) { return oy + kMarginT + (1.0 - axis.frac(v)) * ph; };

        o << "<g class=\"panel\" data-metric=\"" << metrics::metric_name(metric) << "\">\n";
        o << "<text x=\"" << fmt(ox + kMarginL + pw / 2) << "\" y=\"" << fmt(oy + 16)
          << "\" text-anchor=\"middle\" font-size=\"12\">" << metrics::metric_name(metric)
          << (log_scale ? " (log)" : "") << "</text>\n";
        o << "<rect x=\"" << fmt(ox + kMarginL) << "\" y=\"" << fmt(oy + kMarginT) << "\" width=\"" << fmt(pw)
          << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (double t : axis.ticks()) {
            const double y = py(t);
            o << "<line x1=\"" << fmt(ox + kMarginL - 4) << "\" y1=\"" << fmt(y) << "\" x2=\""
              << fmt(ox + kMarginL) << "\" y2=\"" << fmt(y) << "\" stroke=\"#444\"/>\n";
            o << "<text x=\"" << fmt(ox + kMarginL - 6) << "\" y=\"" << fmt(y + 3)
              << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
        }
        for (std::size_t i = 0; i < levels.size(); ++i) {
            o << "<text x=\"" << fmt(px(i)) << "\" y=\"" << fmt(oy + kMarginT + ph + 14)
              << "\" text-anchor=\"middle\">" << levels[i] << "</text>\n";
        }
        if (baseline != nullptr && axis.usable(baseline->mean)) {
            const double y = py(baseline->mean);
            o << "<line class=\"baseline\" x1=\"" << fmt(ox + kMarginL) << "\" y1=\"" << fmt(y) << "\" x2=\""
              << fmt(ox + kMarginL + pw) << "\" y2=\"" << fmt(y)
              << "\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>\n";
        }
        for (const auto& s : kSeries) {
            const std::string kind = resolve(s.kind);
            o << "<g class=\"series\" data-kind=\"" << kind << "\">\n";
            std::string path;
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const auto* c = summary.find(kind, levels[i], metric);
                if (c == nullptr || !axis.usable(c->mean)) continue;
                const double x = px(i), y = py(c->mean);
                path += (path.empty() ? "M" : " L") + fmt(x) + "," + fmt(y);
                if (std::isfinite(c->std) && c->std > 0) {
                    const double top = c->mean + c->std;
                    const double bottom = c->mean - c->std;
                    const double y0 = axis.usable(bottom) ? py(bottom) : oy + kMarginT + ph;
                    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x) << "\" y2=\""
                      << fmt(py(top)) << "\" stroke=\"" << s.color << "\"/>\n";
                }
                marker(o, s.marker, x, y, s.color);
            }
            if (!path.empty()) {
                o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << s.color << '"';
                if (*s.dash) o << " stroke-dasharray=\"" << s.dash << '"';
                o << "/>\n";
            }
            o << "</g>\n";
        }
        o << "</g>\n";
    }

    double lx = 12;
    const double ly = rows * kPanelH + 14;
    for (const auto& s : kSeries) {
        marker(o, s.marker, lx + 4, ly, s.color);
        o << "<text x=\"" << fmt(lx + 12) << "\" y=\"" << fmt(ly + 3) << "\">" << s.label << "</text>\n";
        lx += 150;
    }
    o << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(ly)
      << "\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>\n";
    o << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly + 3) << "\">full set vs truth</text>\n";
    o << "</svg>\n";
    return o.str();
}

std::string fhc_svg(std::span<const LabelledCurve> curves) {
    if (curves.empty()) throw DomainError("plot: no FHC curves");
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    const double width = 520, height = 340, l = 56, r = 150, t = 20, b = 40;
    const double pw = width - l - r, ph = height - t - b;
    double lo = 0.0;
    for (const auto& [label, c] : curves) {
        for (double v : c.correlations) lo = std::min(lo, v);
    }
    lo = std::floor(lo * 10) / 10;
    auto px = [&](double f) { return l + f * pw; };
    auto py = [&](double v) { return t + (1.0 - (v - lo) / (1.0 - lo)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double f = i / 5.0, v = lo + (1.0 - lo) * i / 5.0;
        o << "<text x=\"" << fmt(px(f)) << "\" y=\"" << fmt(t + ph + 14) << "\" text-anchor=\"middle\">"
          << tick_label(f) << "</text>\n";
        o << "<text x=\"" << fmt(l - 6) << "\" y=\"" << fmt(py(v) + 3) << "\" text-anchor=\"end\">"
          << tick_label(v) << "</text>\n";
    }
    o << "<text x=\"" << fmt(l + pw / 2) << "\" y=\"" << fmt(height - 6)
      << "\" text-anchor=\"middle\">normalised frequency</text>\n";

    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& [label, c] = curves[i];
        const char* color = colors[i % 6];
        std::string corr, thr;
        for (std::size_t j = 0; j < c.shell_centers.size(); ++j) {
            const double x = px(c.shell_centers[j]);
            corr += (corr.empty() ? "M" : " L") + fmt(x) + "," + fmt(py(c.correlations[j]));
            thr += (thr.empty() ? "M" : " L") + fmt(x) + "," + fmt(py(c.thresholds[j]));
        }
        o << "<g class=\"curve\" data-label=\"" << escape(label) << "\">\n";
        o << "<path class=\"correlation\" d=\"" << corr << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
        o << "<path class=\"threshold\" d=\"" << thr << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-dasharray=\"4,3\"/>\n";
        o << "</g>\n";
        const double ly = t + 12 + 16 * double(i);
        o << "<line x1=\"" << fmt(width - r + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(width - r + 28)
          << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\"/>\n";
        o << "<text x=\"" << fmt(width - r + 32) << "\" y=\"" << fmt(ly + 3) << "\">" << escape(label)
          << "</text>\n";
    }
    o << "<text x=\"" << fmt(width - r + 10) << "\" y=\"" << fmt(t + 12 + 16 * double(curves.size()) + 3)
      << "\">dashed: half-bit</text>\n";
    o << "</svg>\n";
    return o.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace hsv::harness
