#pragma once

#include <stdexcept>
#include <string>

namespace fpsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed structured document (bad syntax, wrong top-level shape).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// A document parsed but violates an invariant; carries the offending field path.
class ValidationError : public Error {
public:
    ValidationError(std::string field_path, const std::string& what)
        : Error(field_path + ": " + what), field_path_(std::move(field_path)) {}

    const std::string& field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};

/// Scenario-level semantic problem (unresolvable benchmark, missing latency, bad policy).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Named entity not present (catalog lookups).
class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(what) {}
};

/// DRAM budget exhausted during region allocation.
class CapacityExceeded : public Error {
public:
    explicit CapacityExceeded(const std::string& what) : Error(what) {}
};

/// A context frame failed its CRC check; carries the failing frame index.
class CrcMismatch : public Error {
public:
    CrcMismatch(std::size_t frame_index, const std::string& what)
        : Error(what), frame_index_(frame_index) {}

    std::size_t frame_index() const noexcept { return frame_index_; }

private:
    std::size_t frame_index_;
};

/// Sealed blob failed authentication (tampering or wrong key).
class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& what) : Error(what) {}
};

/// Authenticated payload is malformed; signals an internal bug, not tampering.
class DecodeError : public Error {
public:
    explicit DecodeError(const std::string& what) : Error(what) {}
};

}  // namespace fpsim
