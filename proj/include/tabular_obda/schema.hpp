// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tabular_obda/constraints.hpp"
#include "tabular_obda/core_model.hpp"
#include "tabular_obda/sqlite_db.hpp"

namespace obda {

struct ColumnDef {
    std::string name;           // sanitized SQL identifier
    std::string source_column;  // original CSV column name
    Datatype type = Datatype::String;
    bool typed = false;  // declared by a constraint (untyped columns are VARCHAR)
    bool not_null = false;

    bool operator==(const ColumnDef&) const = default;
};

struct ForeignKeyDef {
    std::vector<std::string> columns;
    std::string referenced_table;
    std::vector<std::string> referenced_columns;

    bool operator==(const ForeignKeyDef&) const = default;
};

struct TableDef {
    std::string name;         // sanitized table name
    std::string source_path;  // originating source
    std::vector<ColumnDef> columns;
    std::vector<std::string> primary_key;      // sanitized column names
    std::vector<std::string> unique_sets_raw;  // rendered UNIQUE(...) fragments
    std::vector<ForeignKeyDef> foreign_keys;

    const ColumnDef* by_source_column(const std::string& source_column) const;

    bool operator==(const TableDef&) const = default;
};

struct IndexStatement {
    std::string name;
    std::string table;
    std::vector<std::string> columns;

    bool operator==(const IndexStatement&) const = default;
};

/// The synthesized schema: tables in FK-safe creation order, then
/// indexes. Text rendering is deterministic.
struct DdlScript {
    enum class Dialect { GenericAnsi };
    Dialect dialect = Dialect::GenericAnsi;
    std::vector<TableDef> tables;
    std::vector<IndexStatement> indexes;

    const TableDef* table_for_source(const std::string& source_path) const;
    const TableDef* table(const std::string& name) const;
    std::string to_text() const;
};

struct IndexDecision {
    std::string table;  // source path at decision time
    std::vector<std::string> columns;
    double selectivity = 0.0;  // distinct values / row count
    bool created = false;
    std::string reason;
};

struct SchemaOptions {
    bool emit_foreign_keys = true;
};

/// One table per source with types, NOT NULL, PRIMARY KEY and FOREIGN KEY
/// drawn from the constraint set; untyped columns become VARCHAR.
DdlScript synthesize_schema(const std::vector<TabularSource>& sources,
                            const ConstraintSet& constraints, const SchemaOptions& options = {});

/// The schema a constraint-free load produces: every column VARCHAR, no
/// keys, no indexes.
DdlScript baseline_schema(const std::vector<TabularSource>& sources);

/// Selectivity rule for join-condition columns: create an index iff
/// distinct/rows >= threshold and the column does not lead the primary
/// key.
std::vector<IndexDecision> decide_indexes(const std::vector<TabularSource>& sources,
                                          const ConstraintSet& constraints, const DdlScript& ddl,
                                          double threshold);

void append_indexes(DdlScript& ddl, const std::vector<IndexDecision>& decisions);

struct LoadEntry {
    std::string table;
    std::uint64_t rows_loaded = 0;
};

struct LoadOptions {
    bool validate_range = true;
    bool range_as_error = true;  // false: warn and keep going
    std::vector<Diagnostic>* warnings = nullptr;
};

/// Applies the DDL and bulk-inserts every source in order. Absent cells
/// become SQL NULL; key violations are reported with the offending value.
std::vector<LoadEntry> load(const std::vector<TabularSource>& sources, const DdlScript& ddl,
                            Db& conn, const ConstraintSet& constraints,
                            const LoadOptions& options = {});

/// Rewrites every logical source path to its table name.
MappingDocument translate_mappings(const MappingDocument& m, const DdlScript& ddl);

/// Everything the query layer needs: schema, loaded instance manifest and
/// table-aligned mapping rules.
struct RelationalArtifacts {
    DdlScript ddl;
    MappingDocument translated_mapping;
    std::vector<LoadEntry> load_manifest;
    std::vector<IndexDecision> index_decisions;
    std::string db_url;
};

std::string sanitize_identifier(const std::string& name);

}  // namespace obda
