#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsv {

// All library errors derive from Error so callers can catch one type at stage boundaries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid numeric argument (non-positive spacing, D < d, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed VOL4D / PRJ4D / CSV input. Carries the byte offset where parsing failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

// Phantom does not fit the grid or violates its parameter invariants.
class GeometryError : public Error {
public:
    using Error::Error;
};

// Metric undefined for the input (constant volume, zero variance, L = 0).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Invalid subset request (i = 1, i not dividing the grid, k > pool).
class SamplingError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Bad study configuration. line() is 0 for command-line overrides.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::uint32_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::uint32_t line() const noexcept { return line_; }

private:
    std::uint32_t line_;
};

// A pipeline stage failed; wraps the underlying message with where it happened.
class StageError : public Error {
public:
    StageError(const std::string& stage, std::int64_t level, std::int64_t subset_id, const std::string& what)
        : Error("stage " + stage + (level >= 0 ? " level " + std::to_string(level) : "") +
                (subset_id >= 0 ? " subset " + std::to_string(subset_id) : "") + ": " + what),
          stage_(stage) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace hsv
