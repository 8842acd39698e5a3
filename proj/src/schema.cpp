// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

namespace obda {

namespace {

std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    auto begin = slash == std::string::npos ? 0 : slash + 1;
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos || dot < begin) dot = path.size();
    return path.substr(begin, dot - begin);
}

const char* sql_type(Datatype dt) {
    switch (dt) {
        case Datatype::String: return "VARCHAR";
        case Datatype::Integer: return "INTEGER";
        case Datatype::Decimal: return "DECIMAL";
        case Datatype::Double: return "DOUBLE PRECISION";
        case Datatype::Date: return "DATE";
        case Datatype::Time: return "TIME";
        case Datatype::DateTime: return "TIMESTAMP";
        case Datatype::Boolean: return "BOOLEAN";
    }
    return "VARCHAR";
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

}  // namespace

std::string sanitize_identifier(const std::string& name) {
    std::string out;
    for (unsigned char c : name) {
        if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
        else out.push_back('_');
    }
    if (out.empty()) out = "_";
    if (std::isdigit(static_cast<unsigned char>(out[0]))) out = "t_" + out;
    return out;
}

const ColumnDef* TableDef::by_source_column(const std::string& source_column) const {
    for (const auto& c : columns)
        if (c.source_column == source_column) return &c;
    return nullptr;
}

const TableDef* DdlScript::table_for_source(const std::string& source_path) const {
    for (const auto& t : tables)
        if (t.source_path == source_path) return &t;
    return nullptr;
}

const TableDef* DdlScript::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

std::string DdlScript::to_text() const {
    std::string out;
    for (const auto& t : tables) {
        out += "CREATE TABLE " + t.name + " (\n";
        std::vector<std::string> lines;
        for (const auto& c : t.columns) {
            std::string line = "  " + c.name + " " + sql_type(c.type);
            if (c.not_null) line += " NOT NULL";
            lines.push_back(line);
        }
        if (!t.primary_key.empty())
            lines.push_back("  PRIMARY KEY (" + join_list(t.primary_key) + ")");
        for (const auto& u : t.unique_sets_raw) lines.push_back("  UNIQUE (" + u + ")");
        for (const auto& fk : t.foreign_keys)
            lines.push_back("  FOREIGN KEY (" + join_list(fk.columns) + ") REFERENCES " +
                            fk.referenced_table + " (" + join_list(fk.referenced_columns) + ")");
        for (std::size_t i = 0; i < lines.size(); ++i) {
            out += lines[i];
            if (i + 1 < lines.size()) out += ",";
            out += "\n";
        }
        out += ");\n";
    }
    for (const auto& idx : indexes)
        out += "CREATE INDEX " + idx.name + " ON " + idx.table + " (" + join_list(idx.columns) +
               ");\n";
    return out;
}

namespace {

DdlScript build_tables(const std::vector<TabularSource>& sources) {
    DdlScript ddl;
    std::set<std::string> names;
    for (const auto& src : sources) {
        TableDef table;
        table.source_path = src.path;
        table.name = sanitize_identifier(stem_of(src.path));
        if (!names.insert(table.name).second)
            raise(ErrorKind::NameCollision,
                  "sources '" + src.path + "' and another source reduce to table name '" +
                      table.name + "'");
        std::set<std::string> cols;
        for (const auto& col : src.columns) {
            ColumnDef def;
            def.source_column = col;
            def.name = sanitize_identifier(col);
            if (!cols.insert(def.name).second)
                raise(ErrorKind::NameCollision, src.path + ": columns collide on '" + def.name + "'");
            table.columns.push_back(std::move(def));
        }
        ddl.tables.push_back(std::move(table));
    }
    return ddl;
}

/// Referencing tables after referenced ones; throws on cycles.
void topo_sort_tables(DdlScript& ddl) {
    std::vector<TableDef> sorted;
    std::set<std::string> placed;
    std::size_t guard = 0;
    while (sorted.size() < ddl.tables.size()) {
        bool progressed = false;
        for (const auto& t : ddl.tables) {
            if (placed.count(t.name)) continue;
            bool ready = true;
            for (const auto& fk : t.foreign_keys)
                if (fk.referenced_table != t.name && !placed.count(fk.referenced_table))
                    ready = false;
            if (ready) {
                sorted.push_back(t);
                placed.insert(t.name);
                progressed = true;
            }
        }
        if (!progressed)
            raise(ErrorKind::CyclicForeignKeys, "foreign keys form a cycle");
        if (++guard > ddl.tables.size() + 1) break;
    }
    ddl.tables = std::move(sorted);
}

}  // namespace

DdlScript synthesize_schema(const std::vector<TabularSource>& sources,
                            const ConstraintSet& constraints, const SchemaOptions& options) {
    DdlScript ddl = build_tables(sources);

    auto table_mut = [&ddl](const std::string& source_path) -> TableDef* {
        for (auto& t : ddl.tables)
            if (t.source_path == source_path) return &t;
        return nullptr;
    };

    for (const auto& c : constraints.constraints) {
        TableDef* table = table_mut(c.source);
        if (!table) continue;
        switch (c.kind) {
            case ConstraintKind::Datatype: {
                const auto& payload = std::get<DatatypePayload>(c.payload);
                for (auto& col : table->columns)
                    if (col.source_column == c.columns[0]) {
                        col.type = payload.datatype;
                        col.typed = true;
                    }
                break;
            }
            case ConstraintKind::NotNull: {
                for (auto& col : table->columns)
                    if (col.source_column == c.columns[0]) col.not_null = true;
                break;
            }
            case ConstraintKind::PrimaryKey: {
                std::vector<std::string> pk;
                bool complete = true;
                for (const auto& name : c.columns) {
                    const auto* col = table->by_source_column(name);
                    if (!col) complete = false;
                    else pk.push_back(col->name);
                }
                if (complete) table->primary_key = pk;
                break;
            }
            default:
                break;
        }
    }

    if (options.emit_foreign_keys) {
        for (const auto& c : constraints.constraints) {
            if (c.kind != ConstraintKind::ForeignKey) continue;
            TableDef* table = table_mut(c.source);
            if (!table) continue;
            const auto& payload = std::get<ForeignKeyPayload>(c.payload);
            TableDef* referenced = table_mut(payload.referenced_table);
            if (!referenced) continue;  // referenced source was not selected

            ForeignKeyDef def;
            def.referenced_table = referenced->name;
            bool complete = true;
            for (const auto& name : c.columns) {
                const auto* col = table->by_source_column(name);
                if (!col) complete = false;
                else def.columns.push_back(col->name);
            }
            for (const auto& name : payload.referenced_columns) {
                const auto* col = referenced->by_source_column(name);
                if (!col) complete = false;
                else def.referenced_columns.push_back(col->name);
            }
            if (!complete) continue;
            // The engine requires the referenced columns to be a PK or
            // UNIQUE set.
            if (referenced->primary_key != def.referenced_columns) {
                std::string unique = join_list(def.referenced_columns);
                if (std::find(referenced->unique_sets_raw.begin(),
                              referenced->unique_sets_raw.end(),
                              unique) == referenced->unique_sets_raw.end())
                    referenced->unique_sets_raw.push_back(unique);
            }
            table->foreign_keys.push_back(std::move(def));
        }
    }

    topo_sort_tables(ddl);
    return ddl;
}

DdlScript baseline_schema(const std::vector<TabularSource>& sources) {
    return build_tables(sources);
}

std::vector<IndexDecision> decide_indexes(const std::vector<TabularSource>& sources,
                                          const ConstraintSet& constraints, const DdlScript& ddl,
                                          double threshold) {
    std::vector<IndexDecision> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto* c : constraints.of_kind(ConstraintKind::IndexCandidate)) {
        if (c->columns.size() != 1) continue;
        if (!seen.insert({c->source, c->columns[0]}).second) continue;
        const TabularSource* src = nullptr;
        for (const auto& s : sources)
            if (s.path == c->source) src = &s;
        const TableDef* table = ddl.table_for_source(c->source);
        if (!src || !table) continue;
        const auto* col = table->by_source_column(c->columns[0]);
        if (!col) continue;

        IndexDecision decision;
        decision.table = table->name;
        decision.columns = {col->name};

        int idx = src->column_index(c->columns[0]);
        std::set<Cell> distinct;
        for (const auto& row : src->rows) distinct.insert(row[static_cast<std::size_t>(idx)]);
        decision.selectivity =
            src->rows.empty() ? 0.0
                              : static_cast<double>(distinct.size()) /
                                    static_cast<double>(src->rows.size());

        const bool pk_leading = !table->primary_key.empty() && table->primary_key[0] == col->name;
        if (pk_leading) {
            decision.created = false;
            decision.reason = "covered by PK";
        } else if (decision.selectivity >= threshold) {
            decision.created = true;
            decision.reason = "selectivity " + std::to_string(decision.selectivity) +
                              " >= " + std::to_string(threshold);
        } else {
            decision.created = false;
            decision.reason = "selectivity " + std::to_string(decision.selectivity) + " < " +
                              std::to_string(threshold);
        }
        out.push_back(std::move(decision));
    }
    return out;
}

void append_indexes(DdlScript& ddl, const std::vector<IndexDecision>& decisions) {
    for (const auto& d : decisions) {
        if (!d.created) continue;
        IndexStatement idx;
        idx.table = d.table;
        idx.columns = d.columns;
        idx.name = "idx_" + d.table;
        for (const auto& c : d.columns) idx.name += "_" + c;
        if (std::find(ddl.indexes.begin(), ddl.indexes.end(), idx) == ddl.indexes.end())
            ddl.indexes.push_back(std::move(idx));
    }
}

namespace {

std::optional<SqlValue> parse_typed(const std::string& text, Datatype type) {
    switch (type) {
        case Datatype::Integer: {
            std::int64_t value = 0;
            const char* begin = text.data();
            const char* end = text.data() + text.size();
            if (begin != end && *begin == '+') ++begin;
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc{} || ptr != end) return std::nullopt;
            return SqlValue{value};
        }
        case Datatype::Decimal:
        case Datatype::Double: {
            try {
                std::size_t used = 0;
                double value = std::stod(text, &used);
                if (used != text.size()) return std::nullopt;
                return SqlValue{value};
            } catch (...) {
                return std::nullopt;
            }
        }
        case Datatype::Boolean: {
            if (text == "true" || text == "1") return SqlValue{std::int64_t{1}};
            if (text == "false" || text == "0") return SqlValue{std::int64_t{0}};
            return std::nullopt;
        }
        default:
            return SqlValue{text};
    }
}

}  // namespace

std::vector<LoadEntry> load(const std::vector<TabularSource>& sources, const DdlScript& ddl,
                            Db& conn, const ConstraintSet& constraints,
                            const LoadOptions& options) {
    conn.execute(ddl.to_text());

    // Range bounds per (source, column).
    std::map<std::pair<std::string, std::string>, RangePayload> ranges;
    if (options.validate_range) {
        for (const auto* c : constraints.of_kind(ConstraintKind::Range))
            if (c->columns.size() == 1)
                ranges[{c->source, c->columns[0]}] = std::get<RangePayload>(c->payload);
    }

    std::vector<LoadEntry> manifest;
    conn.execute("BEGIN");
    for (const auto& table : ddl.tables) {
        const TabularSource* src = nullptr;
        for (const auto& s : sources)
            if (s.path == table.source_path) src = &s;
        if (!src) continue;

        std::string sql = "INSERT INTO " + table.name + " (";
        std::string placeholders;
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (i) {
                sql += ", ";
                placeholders += ", ";
            }
            sql += table.columns[i].name;
            placeholders += "?";
        }
        sql += ") VALUES (" + placeholders + ")";
        Stmt stmt = conn.prepare(sql);

        // Tracks PK tuples for contextful duplicate reporting.
        std::set<std::string> pk_seen;
        std::vector<int> pk_indices;
        for (const auto& pk_col : table.primary_key)
            for (std::size_t i = 0; i < table.columns.size(); ++i)
                if (table.columns[i].name == pk_col) pk_indices.push_back(static_cast<int>(i));

        LoadEntry entry;
        entry.table = table.name;
        for (std::size_t r = 0; r < src->rows.size(); ++r) {
            const Row& row = src->rows[r];
            std::vector<SqlValue> values(table.columns.size());
            for (std::size_t i = 0; i < table.columns.size(); ++i) {
                const auto& col = table.columns[i];
                int src_idx = src->column_index(col.source_column);
                const Cell& cell = src_idx >= 0 ? row[static_cast<std::size_t>(src_idx)] : Cell{};
                if (!cell) {
                    if (col.not_null)
                        raise(ErrorKind::ConstraintViolation,
                              table.name + " row " + std::to_string(r + 1) + ": column '" +
                                  col.name + "' is NOT NULL but the cell is absent");
                    values[i] = std::monostate{};
                    continue;
                }
                auto parsed = parse_typed(*cell, col.type);
                if (!parsed) {
                    std::string msg = table.name + " row " + std::to_string(r + 1) + ": value '" +
                                      *cell + "' does not parse as " + to_string(col.type);
                    if (options.range_as_error) raise(ErrorKind::ConstraintViolation, msg);
                    if (options.warnings)
                        options.warnings->push_back(warning_at(table.name, msg + ", loading NULL"));
                    values[i] = std::monostate{};
                    continue;
                }
                auto range = ranges.find({table.source_path, col.source_column});
                if (range != ranges.end()) {
                    double numeric = 0;
                    bool has_numeric = false;
                    if (const auto* iv = std::get_if<std::int64_t>(&*parsed)) {
                        numeric = static_cast<double>(*iv);
                        has_numeric = true;
                    } else if (const auto* dv = std::get_if<double>(&*parsed)) {
                        numeric = *dv;
                        has_numeric = true;
                    }
                    if (has_numeric &&
                        ((range->second.minimum && numeric < *range->second.minimum) ||
                         (range->second.maximum && numeric > *range->second.maximum))) {
                        std::string msg = table.name + " row " + std::to_string(r + 1) +
                                          ": value " + canonical_text(*parsed) +
                                          " outside declared range";
                        if (options.range_as_error) raise(ErrorKind::ConstraintViolation, msg);
                        if (options.warnings)
                            options.warnings->push_back(warning_at(table.name, msg));
                    }
                }
                values[i] = std::move(*parsed);
            }

            if (!pk_indices.empty()) {
                std::string key;
                for (int i : pk_indices) key += canonical_text(values[static_cast<std::size_t>(i)]) + "\x1f";
                if (!pk_seen.insert(key).second)
                    raise(ErrorKind::ConstraintViolation,
                          table.name + " row " + std::to_string(r + 1) +
                              ": duplicate primary key value (" + key.substr(0, key.size() - 1) +
                              ")");
            }

            for (std::size_t i = 0; i < values.size(); ++i)
                stmt.bind(static_cast<int>(i + 1), values[i]);
            try {
                stmt.step();
            } catch (const Error& e) {
                conn.execute("ROLLBACK");
                throw Error(e.kind(), table.name + " row " + std::to_string(r + 1) + ": " +
                                          e.what());
            }
            stmt.reset();
            ++entry.rows_loaded;
        }
        manifest.push_back(entry);
    }

    // Foreign keys are validated here, before commit, so orphans are
    // reported with the offending value rather than an engine code.
    for (const auto& table : ddl.tables) {
        for (const auto& fk : table.foreign_keys) {
            std::string child_cols = join_list(fk.columns);
            std::string parent_cols = join_list(fk.referenced_columns);
            std::string sql = "SELECT " + child_cols + " FROM " + table.name + " c WHERE ";
            for (std::size_t i = 0; i < fk.columns.size(); ++i) {
                if (i) sql += " AND ";
                sql += "c." + fk.columns[i] + " IS NOT NULL";
            }
            sql += " AND NOT EXISTS (SELECT 1 FROM " + fk.referenced_table + " p WHERE ";
            for (std::size_t i = 0; i < fk.columns.size(); ++i) {
                if (i) sql += " AND ";
                sql += "p." + fk.referenced_columns[i] + " = c." + fk.columns[i];
            }
            sql += ") LIMIT 1";
            Stmt stmt = conn.prepare(sql);
            if (stmt.step()) {
                std::string value = canonical_text(stmt.column(0));
                conn.execute("ROLLBACK");
                raise(ErrorKind::ConstraintViolation,
                      table.name + ": foreign key (" + child_cols + ") references " +
                          fk.referenced_table + " (" + parent_cols + ") but value '" + value +
                          "' has no match");
            }
        }
    }

    conn.execute("COMMIT");
    return manifest;
}

MappingDocument translate_mappings(const MappingDocument& m, const DdlScript& ddl) {
    MappingDocument out = m;
    for (auto& tm : out.triples_maps) {
        const auto* table = ddl.table_for_source(tm.source_path);
        if (!table)
            raise(ErrorKind::UnmappedSource,
                  "mapping:" + tm.id + ": source '" + tm.source_path + "' has no table");
        tm.source_path = table->name;
        tm.source_kind = SourceKind::Table;
    }
    return out;
}

}  // namespace obda
