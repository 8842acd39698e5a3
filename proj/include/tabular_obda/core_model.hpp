// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tabular_obda/diagnostics.hpp"

namespace obda {

/// A cell is either a string value (possibly empty) or absent. Short rows
/// are a parse error, so absence only ever arises from NULL substitution.
using Cell = std::optional<std::string>;
using Row = std::vector<Cell>;

/// One tabular relation: a path, a resolved header, and its data rows.
/// Every row has exactly columns.size() cells.
struct TabularSource {
    std::string path;
    std::vector<std::string> columns;
    std::vector<Row> rows;

    /// Index of a column name, or -1 when the source does not have it.
    int column_index(const std::string& name) const;

    bool operator==(const TabularSource&) const = default;
};

/// A string template with `$(column)` placeholders, e.g.
/// `http://example.org/routes/$(route_id)`.
struct Template {
    struct Part {
        bool is_column = false;
        std::string text;  // literal text or column name
        bool operator==(const Part&) const = default;
    };

    std::string pattern;       // original textual form
    std::vector<Part> parts;

    static Template parse(const std::string& pattern);

    /// Column names referenced by the template, in order of appearance.
    std::vector<std::string> columns() const;

    /// True when the template is exactly one column reference with no
    /// surrounding literal text.
    bool is_single_column() const;

    bool operator==(const Template& other) const { return pattern == other.pattern; }
};

struct ColumnReference {
    std::string column;
    bool operator==(const ColumnReference&) const = default;
};

struct FunctionCall;

/// Argument of a transformation function: a column, a constant, or a
/// nested call.
struct FunctionArg {
    enum class Kind { Column, Constant, Call };
    Kind kind = Kind::Constant;
    std::string text;                     // column name or constant
    std::shared_ptr<FunctionCall> call;   // when kind == Call

    bool operator==(const FunctionArg& other) const;
};

struct FunctionCall {
    std::string name;  // registry key
    std::vector<FunctionArg> args;

    /// All column names referenced anywhere in the call tree.
    std::vector<std::string> columns() const;

    bool operator==(const FunctionCall&) const = default;
};

inline bool FunctionArg::operator==(const FunctionArg& other) const {
    if (kind != other.kind || text != other.text) return false;
    if (kind != Kind::Call) return true;
    if (!call || !other.call) return call == other.call;
    return *call == *other.call;
}

/// Reference to another triples map, used as the object of a predicate.
struct JoinRef {
    std::string parent_tm_id;
    bool operator==(const JoinRef&) const = default;
};

struct JoinCondition {
    std::string child_column;   // column of the referencing (child) source
    std::string parent_column;  // column of the referenced (parent) source
    bool operator==(const JoinCondition&) const = default;
};

enum class TermKind { Literal, Iri };

using ObjectSpec = std::variant<ColumnReference, Template, FunctionCall, JoinRef>;

struct PredicateObjectMap {
    std::string predicate;  // absolute IRI
    ObjectSpec object = ColumnReference{};
    std::optional<JoinCondition> join;  // present iff object is a JoinRef
    std::optional<std::string> datatype_hint;
    TermKind term = TermKind::Literal;

    bool operator==(const PredicateObjectMap&) const = default;

    /// Columns of the child source referenced by the object (join child
    /// column included, parent column excluded).
    std::vector<std::string> local_columns() const;
};

/// Kind of logical source a triples map points at: a CSV file before
/// translation, a relational table afterwards.
enum class SourceKind { CsvFile, Table };

struct TriplesMap {
    std::string id;
    std::string source_path;
    SourceKind source_kind = SourceKind::CsvFile;
    Template subject_template;
    std::optional<std::string> class_iri;
    std::vector<PredicateObjectMap> pom;

    bool operator==(const TriplesMap&) const = default;

    /// Every column of the logical source referenced by this map: subject
    /// template, predicate objects, function arguments and join children.
    std::vector<std::string> referenced_columns() const;

    /// Predicates provided by this map, rdf:type included when a class is set.
    std::vector<std::string> provided_predicates() const;
};

struct MappingDocument {
    std::vector<TriplesMap> triples_maps;

    const TriplesMap* find(const std::string& id) const;
    std::vector<const TriplesMap*> maps_for_source(const std::string& path) const;

    bool operator==(const MappingDocument&) const = default;
};

enum class Datatype { String, Integer, Decimal, Double, Date, Time, DateTime, Boolean };

const char* to_string(Datatype dt);
std::optional<Datatype> datatype_from_string(const std::string& name);
bool is_numeric(Datatype dt);
bool is_temporal(Datatype dt);

struct ColumnMetadata {
    std::string name;
    Datatype datatype = Datatype::String;
    std::optional<std::string> format;
    bool required = false;
    std::optional<std::string> default_value;
    std::vector<std::string> null_markers;
    std::optional<char> separator;
    std::optional<double> minimum;
    std::optional<double> maximum;

    bool operator==(const ColumnMetadata&) const = default;
};

struct ForeignKeyMetadata {
    std::vector<std::string> columns;
    std::string referenced_table;  // source path
    std::vector<std::string> referenced_columns;

    bool operator==(const ForeignKeyMetadata&) const = default;
};

struct TableMetadata {
    std::string url;  // source path
    std::vector<ColumnMetadata> columns;
    std::optional<std::vector<std::string>> primary_key;
    std::vector<ForeignKeyMetadata> foreign_keys;
    std::optional<std::vector<std::string>> row_titles;  // header injection
    std::optional<char> delimiter;                       // CSV dialect override

    const ColumnMetadata* column(const std::string& name) const;

    bool operator==(const TableMetadata&) const = default;
};

struct MetadataDocument {
    std::vector<TableMetadata> tables;

    const TableMetadata* table(const std::string& url) const;

    bool operator==(const MetadataDocument&) const = default;
};

/// The root input object: tabular sources plus their OBDA annotations.
struct VirtualTabularDataset {
    std::vector<TabularSource> sources;
    std::vector<std::string> ontology_terms;  // opaque vocabulary, unused by the pipeline
    MappingDocument mapping;
    MetadataDocument metadata;

    const TabularSource* source(const std::string& path) const;
    TabularSource* source_mut(const std::string& path);
};

class FunctionRegistry;

/// Checks every structural invariant of the dataset and returns one
/// diagnostic per violation, in a deterministic order. An empty result
/// means the dataset is well formed.
std::vector<Diagnostic> validate_vtd(const VirtualTabularDataset& vtd);
std::vector<Diagnostic> validate_vtd(const VirtualTabularDataset& vtd,
                                     const FunctionRegistry& registry);

inline const std::string kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

}  // namespace obda
