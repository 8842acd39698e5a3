// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace obda {

enum class Severity { Warning, Error };

/// A non-fatal finding produced by validation or lenient parsing.
/// Validators return diagnostics instead of throwing so that callers can
/// collect everything wrong with an input in one pass.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string location;  // e.g. "stops.csv", "mapping:routes", "query:3:14"
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

inline Diagnostic error_at(std::string location, std::string message) {
    return Diagnostic{Severity::Error, std::move(location), std::move(message)};
}

inline Diagnostic warning_at(std::string location, std::string message) {
    return Diagnostic{Severity::Warning, std::move(location), std::move(message)};
}

/// Error categories surfaced to the CLI. Each maps onto one of the
/// documented failure modes of the pipeline.
enum class ErrorKind {
    Syntax,
    UnsupportedFeature,
    UnknownFunction,
    DanglingParentMap,
    ConflictingAnnotation,
    Io,
    RaggedRow,
    MissingHeader,
    ConflictingConstraint,
    NoMatchingTriplesMap,
    FormatViolation,
    FunctionError,
    CyclicForeignKeys,
    NameCollision,
    ConstraintViolation,
    UnmappedSource,
    UntypedComparison,
    Engine,
    Adapter,
    MonotonicityViolation,
    InvalidInput,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

const char* to_string(ErrorKind kind);

}  // namespace obda
