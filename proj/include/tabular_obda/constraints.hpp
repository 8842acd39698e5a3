// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tabular_obda/core_model.hpp"

namespace obda {

enum class ConstraintKind {
    PrimaryKey,
    ForeignKey,
    NotNull,
    Datatype,
    Format,
    Range,
    Default,
    NullMarkers,
    Separator2NF,
    MultiEntity3NF,
    Substitution,
    CreateColumn,
    IndexCandidate,
};

const char* to_string(ConstraintKind kind);

struct ForeignKeyPayload {
    std::string referenced_table;
    std::vector<std::string> referenced_columns;
    bool operator==(const ForeignKeyPayload&) const = default;
};

struct DatatypePayload {
    Datatype datatype = Datatype::String;
    bool operator==(const DatatypePayload&) const = default;
};

struct FormatPayload {
    std::string pattern;
    Datatype datatype = Datatype::String;
    bool operator==(const FormatPayload&) const = default;
};

struct RangePayload {
    std::optional<double> minimum;
    std::optional<double> maximum;
    bool operator==(const RangePayload&) const = default;
};

struct DefaultPayload {
    std::string value;
    bool operator==(const DefaultPayload&) const = default;
};

struct NullMarkersPayload {
    std::vector<std::string> markers;
    bool operator==(const NullMarkersPayload&) const = default;
};

struct SeparatorPayload {
    char separator = ';';
    bool operator==(const SeparatorPayload&) const = default;
};

/// Two triples maps over one source whose referenced columns overlap only
/// in the references linking them (explicit join conditions or textually
/// identical templates).
struct MultiEntityPayload {
    std::string tm_a;
    std::string tm_b;
    std::vector<std::string> link_columns;
    bool operator==(const MultiEntityPayload&) const = default;
};

/// Per-cell normalization parameters for one column, aggregated from the
/// null/default/format annotations.
struct SubstitutionPayload {
    std::vector<std::string> markers;
    std::optional<std::string> default_value;
    std::optional<std::string> format;
    Datatype datatype = Datatype::String;
    bool operator==(const SubstitutionPayload&) const = default;
};

struct CreateColumnPayload {
    std::string tm_id;
    std::size_t pom_index = 0;
    FunctionCall function;
    bool operator==(const CreateColumnPayload&) const = default;
};

struct IndexCandidatePayload {
    std::string reason;  // e.g. "join child of <tm>"
    bool operator==(const IndexCandidatePayload&) const = default;
};

using ConstraintPayload =
    std::variant<std::monostate, ForeignKeyPayload, DatatypePayload, FormatPayload, RangePayload,
                 DefaultPayload, NullMarkersPayload, SeparatorPayload, MultiEntityPayload,
                 SubstitutionPayload, CreateColumnPayload, IndexCandidatePayload>;

struct Constraint {
    ConstraintKind kind = ConstraintKind::Datatype;
    std::string source;                // target source path
    std::vector<std::string> columns;  // target columns
    ConstraintPayload payload;

    /// Application phase, matching the pipeline loop: normalization
    /// (split, cut), preparation (sub, create), then schema and indexes.
    int phase() const;

    bool operator==(const Constraint&) const = default;
};

struct ConstraintSet {
    std::vector<Constraint> constraints;

    std::vector<const Constraint*> of_kind(ConstraintKind kind) const;
    std::vector<const Constraint*> for_source(const std::string& path) const;
};

/// Derives the typed constraint set from mapping rules and metadata
/// annotations. The result is ordered by application phase and is
/// deterministic for identical inputs.
ConstraintSet extract_constraints(const MappingDocument& m, const MetadataDocument& md);

std::string constraints_to_json(const ConstraintSet& set);

}  // namespace obda
