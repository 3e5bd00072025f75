#pragma once

// Little-endian scalar encoding shared by the VOL4D and PRJ4D readers/writers.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <type_traits>

namespace hsv::detail {

template <typename T>
    requires std::is_trivially_copyable_v<T>
void store_le(std::span<std::byte> out, T value) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    std::array<std::byte, sizeof(T)> raw;
    std::memcpy(raw.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    }
    std::memcpy(out.data(), raw.data(), sizeof(T));
}

template <typename T>
    requires std::is_trivially_copyable_v<T>
T load_le(std::span<const std::byte> in) {
    std::array<std::byte, sizeof(T)> raw;
    std::memcpy(raw.data(), in.data(), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    }
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
}

}  // namespace hsv::detail
