#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vaep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file layout does not match the documented schema (names or types).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A value violates an invariant of the data model.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Not enough defined data points for the requested statistic.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Input lies outside the domain an operation is defined on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage's input artifact does not exist; names the stage that
/// produces it.
class MissingArtifact : public Error {
public:
    MissingArtifact(std::string stage, const std::string& path)
        : Error("missing upstream artifact " + path + " (run the '" + stage + "' stage first)"),
          stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Bad invocation: unknown option values, unreadable config, unusable paths.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace vaep
