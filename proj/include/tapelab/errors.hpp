#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tapelab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PriceParseError : public Error {
public:
    enum class Kind { Malformed, TooManyDecimals, Overflow };
    PriceParseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class TapeFormatError : public Error {
public:
    enum class Kind { BadMagic, Truncated, VersionMismatch, Corrupt };
    TapeFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Input violates a required ordering (unsorted tape, mixed symbols).
class OrderingError : public Error {
public:
    using Error::Error;
};

class CsvImportError : public Error {
public:
    enum class Kind { UnknownTicker, UnknownExchange, Malformed, TimestampOutOfRange };
    CsvImportError(Kind kind, std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}
    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

/// Quote from a venue that does not display quotes (TRFs).
class QuoteRejected : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Fit undefined (fewer than two points, or zero variance in x).
class DegenerateFit : public Error {
public:
    using Error::Error;
};

class DataNotFound : public Error {
public:
    using Error::Error;
};

} // namespace tapelab
