#include "hsv/projector/projection_io.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "hsv/core/byte_io.hpp"
#include "hsv/error.hpp"

namespace hsv::projector {
namespace {

constexpr std::array<char, 8> kMagic = {'P', 'R', 'J', '4', 'D', '\0', '\0', '\0'};
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 40;

void read_exact(std::istream& in, std::vector<std::byte>& buf, std::uint64_t offset,
                const char* what) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::uint64_t>(in.gcount());
    if (got < buf.size()) {
        throw FormatError(std::string("PRJ4D: truncated ") + what + ", expected " +
                              std::to_string(buf.size()) + " bytes, got " + std::to_string(got),
                          offset + got);
    }
}

}  // namespace

void write_projections(const ProjectionSet& set, std::ostream& out) {
    set.validate();
    std::vector<std::byte> buf(kProjectionHeaderSize + 8 * set.n_angles() + 4 * set.pixels.size());
    std::span<std::byte> s(buf);
    std::memcpy(buf.data(), kMagic.data(), kMagic.size());
    const std::uint32_t fields[5] = {set.experiment_id, set.frames,
                                     static_cast<std::uint32_t>(set.n_angles()), set.detector_u,
                                     set.detector_v};
    for (int i = 0; i < 5; ++i) detail::store_le(s.subspan(8 + 4 * i), fields[i]);
    buf[28] = std::byte{static_cast<unsigned char>(set.geometry_known ? 1 : 0)};
    std::size_t pos = kProjectionHeaderSize;
    for (double a : set.angles_deg) {
        detail::store_le(s.subspan(pos), a);
        pos += 8;
    }
    for (float p : set.pixels) {
        detail::store_le(s.subspan(pos), p);
        pos += 4;
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("write_projections: stream write failed");
}

void write_projections(const ProjectionSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write_projections: cannot open " + path.string());
    write_projections(set, out);
}

ProjectionSet read_projections(std::istream& in) {
    std::vector<std::byte> header(kProjectionHeaderSize);
    read_exact(in, header, 0, "header");
    if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
        throw FormatError("PRJ4D: bad magic", 0);
    }
    std::span<const std::byte> h(header);
    ProjectionSet set;
    set.experiment_id = detail::load_le<std::uint32_t>(h.subspan(8));
    set.frames = detail::load_le<std::uint32_t>(h.subspan(12));
    const auto n_angles = detail::load_le<std::uint32_t>(h.subspan(16));
    set.detector_u = detail::load_le<std::uint32_t>(h.subspan(20));
    set.detector_v = detail::load_le<std::uint32_t>(h.subspan(24));
    const auto flag = static_cast<unsigned char>(header[28]);
    if (flag > 1) throw FormatError("PRJ4D: geometry_known must be 0 or 1", 28);
    set.geometry_known = flag == 1;
    if (set.frames == 0 || n_angles == 0 || set.detector_u == 0 || set.detector_v == 0) {
        throw FormatError("PRJ4D: zero dimension", 12);
    }
    const std::uint64_t count =
        std::uint64_t{set.frames} * n_angles * set.detector_u * set.detector_v;
    if (count > kMaxValues || count / set.frames / n_angles / set.detector_u != set.detector_v) {
        throw FormatError("PRJ4D: dimension overflow", 12);
    }

    std::vector<std::byte> angles(8 * std::size_t{n_angles});
    read_exact(in, angles, kProjectionHeaderSize, "angle table");
    for (std::uint32_t a = 0; a < n_angles; ++a) {
        set.angles_deg.push_back(detail::load_le<double>(std::span<const std::byte>(angles).subspan(8 * a)));
    }
    const std::uint64_t payload_offset = kProjectionHeaderSize + angles.size();
    std::vector<std::byte> payload(4 * count);
    read_exact(in, payload, payload_offset, "pixel payload");
    set.pixels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        set.pixels[i] = detail::load_le<float>(std::span<const std::byte>(payload).subspan(4 * i));
        if (!std::isfinite(set.pixels[i])) {
            throw FormatError("PRJ4D: non-finite pixel", payload_offset + 4 * i);
        }
    }
    try {
        validate_angles(set.angles_deg);
    } catch (const SamplingError& e) {
        throw FormatError(std::string("PRJ4D: ") + e.what(), kProjectionHeaderSize);
    }
    return set;
}

ProjectionSet read_projections(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_projections: cannot open " + path.string());
    return read_projections(in);
}

}  // namespace hsv::projector
