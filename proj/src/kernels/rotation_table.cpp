#include "hsv/kernels/rotation_table.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hsv::kernels {

RotationTable build_rotation_table(Dims3 dims, double angle_deg, double step) {
    RotationTable table;
    table.dims = dims;
    table.angle_deg = angle_deg;
    table.step = step;

    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double cx = 0.5 * (static_cast<double>(dims.x) - 1.0);
    const double cy = 0.5 * (static_cast<double>(dims.y) - 1.0);
    const std::size_t plane = static_cast<std::size_t>(dims.x) * dims.y;

    std::vector<double> acc(plane, 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<std::uint32_t> column_counts(plane, 0);

    table.row_offsets.reserve(dims.y + 1);
    table.row_offsets.push_back(0);
    for (std::uint32_t u = 0; u < dims.y; ++u) {
        const double yu = static_cast<double>(u) - cy;
        for (std::uint32_t is = 0; is < dims.x; ++is) {
            const double xs = static_cast<double>(is) - cx;
            const double px = cx + c * xs - s * yu;
            const double py = cy + s * xs + c * yu;
            const double fx0 = std::floor(px);
            const double fy0 = std::floor(py);
            const double fx = px - fx0;
            const double fy = py - fy0;
            const long x0 = static_cast<long>(fx0);
            const long y0 = static_cast<long>(fy0);
            const double w[4] = {(1 - fx) * (1 - fy), (1 - fx) * fy, fx * (1 - fy), fx * fy};
            const long nx[4] = {x0, x0, x0 + 1, x0 + 1};
            const long ny[4] = {y0, y0 + 1, y0, y0 + 1};
            for (int k = 0; k < 4; ++k) {
                if (w[k] == 0.0) continue;
                if (nx[k] < 0 || ny[k] < 0 || nx[k] >= static_cast<long>(dims.x) ||
                    ny[k] >= static_cast<long>(dims.y)) {
                    continue;
                }
                const auto col = static_cast<std::uint32_t>(nx[k] * dims.y + ny[k]);
                if (acc[col] == 0.0) touched.push_back(col);
                acc[col] += step * w[k];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (std::uint32_t col : touched) {
            if (acc[col] != 0.0) {
                table.row_taps.push_back({col, acc[col]});
                ++column_counts[col];
            }
            acc[col] = 0.0;
        }
        touched.clear();
        table.row_offsets.push_back(static_cast<std::uint32_t>(table.row_taps.size()));
    }

    table.column_offsets.assign(plane + 1, 0);
    for (std::size_t col = 0; col < plane; ++col) {
        table.column_offsets[col + 1] = table.column_offsets[col] + column_counts[col];
    }
    table.column_taps.resize(table.row_taps.size());
    std::vector<std::uint32_t> cursor(table.column_offsets.begin(), table.column_offsets.end() - 1);
    for (std::uint32_t u = 0; u < dims.y; ++u) {
        for (std::uint32_t k = table.row_offsets[u]; k < table.row_offsets[u + 1]; ++k) {
            const Tap& tap = table.row_taps[k];
            table.column_taps[cursor[tap.index]++] = {u, tap.weight};
        }
    }
    return table;
}

}  // namespace hsv::kernels
