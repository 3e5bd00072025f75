#include "hsv/core/volume_io.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "hsv/core/byte_io.hpp"
#include "hsv/error.hpp"

namespace hsv {
namespace {

constexpr std::array<char, 8> kMagic = {'V', 'O', 'L', '4', 'D', '\0', '\0', '\0'};

// Refuse payloads above 2^40 values; anything larger is a corrupt header, not a volume.
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 40;

}  // namespace

void write_volume(const Volume4D& volume, std::ostream& out) {
    std::array<std::byte, kVolumeHeaderSize> header{};
    std::memcpy(header.data(), kMagic.data(), kMagic.size());
    const Dims4& d = volume.dims();
    const std::uint32_t dims[4] = {d.t, d.x, d.y, d.z};
    for (int i = 0; i < 4; ++i) detail::store_le(std::span(header).subspan(8 + 4 * i), dims[i]);
    detail::store_le(std::span(header).subspan(24), volume.spacing_dx());
    detail::store_le(std::span(header).subspan(32), volume.frame_dt());
    out.write(reinterpret_cast<const char*>(header.data()), header.size());

    auto data = volume.data();
    std::vector<std::byte> payload(data.size() * 4);
    for (std::size_t i = 0; i < data.size(); ++i) {
        detail::store_le(std::span(payload).subspan(4 * i), data[i]);
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error("write_volume: stream write failed");
}

void write_volume(const Volume4D& volume, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write_volume: cannot open " + path.string());
    write_volume(volume, out);
}

Volume4D read_volume(std::istream& in) {
    std::array<std::byte, kVolumeHeaderSize> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    const auto got = static_cast<std::uint64_t>(in.gcount());
    if (got < kVolumeHeaderSize) {
        throw FormatError("VOL4D: truncated header, expected 64 bytes, got " + std::to_string(got),
                          got);
    }
    if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
        throw FormatError("VOL4D: bad magic", 0);
    }
    std::uint32_t dims[4];
    std::uint64_t count = 1;
    for (int i = 0; i < 4; ++i) {
        dims[i] = detail::load_le<std::uint32_t>(std::span(header).subspan(8 + 4 * i));
        if (dims[i] == 0) throw FormatError("VOL4D: zero dimension", 8 + 4 * i);
        count *= dims[i];
        if (count > kMaxValues) throw FormatError("VOL4D: dimension overflow", 8 + 4 * i);
    }
    const double dx = detail::load_le<double>(std::span(header).subspan(24));
    const double dt = detail::load_le<double>(std::span(header).subspan(32));
    if (!(dx > 0.0) || !std::isfinite(dx)) throw FormatError("VOL4D: invalid dx", 24);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw FormatError("VOL4D: invalid dt", 32);

    std::vector<std::byte> payload(count * 4);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    const auto payload_got = static_cast<std::uint64_t>(in.gcount());
    if (payload_got < payload.size()) {
        throw FormatError("VOL4D: truncated payload, expected " + std::to_string(count) +
                              " values, got " + std::to_string(payload_got / 4),
                          kVolumeHeaderSize + payload_got);
    }
    std::vector<float> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        data[i] = detail::load_le<float>(std::span<const std::byte>(payload).subspan(4 * i));
        if (!std::isfinite(data[i])) {
            throw FormatError("VOL4D: non-finite value", kVolumeHeaderSize + 4 * i);
        }
    }
    return Volume4D(Dims4{dims[0], dims[1], dims[2], dims[3]}, dx, dt, std::move(data));
}

Volume4D read_volume(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_volume: cannot open " + path.string());
    return read_volume(in);
}

}  // namespace hsv
