// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/core_model.hpp"

#include <algorithm>
#include <set>

#include "tabular_obda/functions.hpp"

namespace obda {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "SyntaxError";
        case ErrorKind::UnsupportedFeature: return "UnsupportedFeature";
        case ErrorKind::UnknownFunction: return "UnknownFunction";
        case ErrorKind::DanglingParentMap: return "DanglingParentMap";
        case ErrorKind::ConflictingAnnotation: return "ConflictingAnnotation";
        case ErrorKind::Io: return "IoError";
        case ErrorKind::RaggedRow: return "RaggedRow";
        case ErrorKind::MissingHeader: return "MissingHeader";
        case ErrorKind::ConflictingConstraint: return "ConflictingConstraint";
        case ErrorKind::NoMatchingTriplesMap: return "NoMatchingTriplesMap";
        case ErrorKind::FormatViolation: return "FormatViolation";
        case ErrorKind::FunctionError: return "FunctionError";
        case ErrorKind::CyclicForeignKeys: return "CyclicForeignKeys";
        case ErrorKind::NameCollision: return "NameCollision";
        case ErrorKind::ConstraintViolation: return "ConstraintViolation";
        case ErrorKind::UnmappedSource: return "UnmappedSource";
        case ErrorKind::UntypedComparison: return "UntypedComparison";
        case ErrorKind::Engine: return "EngineError";
        case ErrorKind::Adapter: return "AdapterError";
        case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
        case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Error";
}

int TabularSource::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

Template Template::parse(const std::string& pattern) {
    Template tpl;
    tpl.pattern = pattern;
    std::string literal;
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] == '$' && i + 1 < pattern.size() && pattern[i + 1] == '(') {
            auto close = pattern.find(')', i + 2);
            if (close == std::string::npos)
                raise(ErrorKind::Syntax, "unterminated $( in template: " + pattern);
            if (!literal.empty()) {
                tpl.parts.push_back({false, literal});
                literal.clear();
            }
            tpl.parts.push_back({true, pattern.substr(i + 2, close - i - 2)});
            i = close + 1;
        } else {
            literal.push_back(pattern[i]);
            ++i;
        }
    }
    if (!literal.empty()) tpl.parts.push_back({false, literal});
    return tpl;
}

std::vector<std::string> Template::columns() const {
    std::vector<std::string> out;
    for (const auto& p : parts)
        if (p.is_column) out.push_back(p.text);
    return out;
}

bool Template::is_single_column() const {
    return parts.size() == 1 && parts[0].is_column;
}

std::vector<std::string> FunctionCall::columns() const {
    std::vector<std::string> out;
    for (const auto& arg : args) {
        if (arg.kind == FunctionArg::Kind::Column) {
            out.push_back(arg.text);
        } else if (arg.kind == FunctionArg::Kind::Call && arg.call) {
            auto nested = arg.call->columns();
            out.insert(out.end(), nested.begin(), nested.end());
        }
    }
    return out;
}

std::vector<std::string> PredicateObjectMap::local_columns() const {
    std::vector<std::string> out;
    if (const auto* col = std::get_if<ColumnReference>(&object)) {
        out.push_back(col->column);
    } else if (const auto* tpl = std::get_if<Template>(&object)) {
        auto cols = tpl->columns();
        out.insert(out.end(), cols.begin(), cols.end());
    } else if (const auto* fn = std::get_if<FunctionCall>(&object)) {
        auto cols = fn->columns();
        out.insert(out.end(), cols.begin(), cols.end());
    }
    if (join) out.push_back(join->child_column);
    return out;
}

std::vector<std::string> TriplesMap::referenced_columns() const {
    std::vector<std::string> out = subject_template.columns();
    for (const auto& p : pom) {
        auto cols = p.local_columns();
        out.insert(out.end(), cols.begin(), cols.end());
    }
    // dedupe, keep first-appearance order
    std::vector<std::string> unique;
    for (auto& c : out)
        if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
    return unique;
}

std::vector<std::string> TriplesMap::provided_predicates() const {
    std::vector<std::string> out;
    if (class_iri) out.push_back(kRdfType);
    for (const auto& p : pom)
        if (std::find(out.begin(), out.end(), p.predicate) == out.end())
            out.push_back(p.predicate);
    return out;
}

const TriplesMap* MappingDocument::find(const std::string& id) const {
    for (const auto& tm : triples_maps)
        if (tm.id == id) return &tm;
    return nullptr;
}

std::vector<const TriplesMap*> MappingDocument::maps_for_source(const std::string& path) const {
    std::vector<const TriplesMap*> out;
    for (const auto& tm : triples_maps)
        if (tm.source_path == path) out.push_back(&tm);
    return out;
}

const char* to_string(Datatype dt) {
    switch (dt) {
        case Datatype::String: return "string";
        case Datatype::Integer: return "integer";
        case Datatype::Decimal: return "decimal";
        case Datatype::Double: return "double";
        case Datatype::Date: return "date";
        case Datatype::Time: return "time";
        case Datatype::DateTime: return "datetime";
        case Datatype::Boolean: return "boolean";
    }
    return "string";
}

std::optional<Datatype> datatype_from_string(const std::string& name) {
    if (name == "string") return Datatype::String;
    if (name == "integer" || name == "int" || name == "long") return Datatype::Integer;
    if (name == "decimal") return Datatype::Decimal;
    if (name == "double" || name == "float" || name == "number") return Datatype::Double;
    if (name == "date") return Datatype::Date;
    if (name == "time") return Datatype::Time;
    if (name == "datetime" || name == "dateTime") return Datatype::DateTime;
    if (name == "boolean") return Datatype::Boolean;
    return std::nullopt;
}

bool is_numeric(Datatype dt) {
    return dt == Datatype::Integer || dt == Datatype::Decimal || dt == Datatype::Double;
}

bool is_temporal(Datatype dt) {
    return dt == Datatype::Date || dt == Datatype::Time || dt == Datatype::DateTime;
}

const ColumnMetadata* TableMetadata::column(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

const TableMetadata* MetadataDocument::table(const std::string& url) const {
    for (const auto& t : tables)
        if (t.url == url) return &t;
    return nullptr;
}

const TabularSource* VirtualTabularDataset::source(const std::string& path) const {
    for (const auto& s : sources)
        if (s.path == path) return &s;
    return nullptr;
}

TabularSource* VirtualTabularDataset::source_mut(const std::string& path) {
    for (auto& s : sources)
        if (s.path == path) return &s;
    return nullptr;
}

namespace {

void check_columns_exist(const TabularSource& src, const std::vector<std::string>& cols,
                         const std::string& where, std::vector<Diagnostic>& out) {
    for (const auto& c : cols)
        if (src.column_index(c) < 0)
            out.push_back(error_at(where, "unknown column '" + c + "' in " + src.path));
}

}  // namespace

std::vector<Diagnostic> validate_vtd(const VirtualTabularDataset& vtd) {
    return validate_vtd(vtd, FunctionRegistry::builtin());
}

std::vector<Diagnostic> validate_vtd(const VirtualTabularDataset& vtd,
                                     const FunctionRegistry& registry) {
    std::vector<Diagnostic> out;

    // Source shape: consistent widths, unique column names, unique paths.
    std::set<std::string> source_paths;
    for (const auto& src : vtd.sources) {
        if (!source_paths.insert(src.path).second)
            out.push_back(error_at(src.path, "duplicate source path"));
        std::set<std::string> names;
        for (const auto& c : src.columns)
            if (!names.insert(c).second)
                out.push_back(error_at(src.path, "duplicate column name '" + c + "'"));
        for (std::size_t r = 0; r < src.rows.size(); ++r)
            if (src.rows[r].size() != src.columns.size())
                out.push_back(error_at(src.path, "row " + std::to_string(r + 1) +
                                                     " has " + std::to_string(src.rows[r].size()) +
                                                     " cells, expected " +
                                                     std::to_string(src.columns.size())));
    }

    // Triples maps: unique ids, resolvable sources, in-source column refs,
    // resolvable join parents, registered functions.
    std::set<std::string> tm_ids;
    for (const auto& tm : vtd.mapping.triples_maps) {
        const std::string where = "mapping:" + tm.id;
        if (!tm_ids.insert(tm.id).second)
            out.push_back(error_at(where, "duplicate triples map id"));
        const auto* src = vtd.source(tm.source_path);
        if (!src) {
            out.push_back(error_at(where, "logical source '" + tm.source_path +
                                              "' does not resolve to a tabular source"));
            continue;
        }
        check_columns_exist(*src, tm.subject_template.columns(), where, out);
        for (const auto& p : tm.pom) {
            check_columns_exist(*src, p.local_columns(), where, out);
            if (const auto* join = std::get_if<JoinRef>(&p.object)) {
                if (!p.join) {
                    out.push_back(error_at(where, "join reference without a join condition"));
                } else {
                    const auto* parent = vtd.mapping.find(join->parent_tm_id);
                    if (!parent) {
                        out.push_back(error_at(where, "join condition parent '" +
                                                          join->parent_tm_id +
                                                          "' names no triples map"));
                    } else if (const auto* psrc = vtd.source(parent->source_path)) {
                        check_columns_exist(*psrc, {p.join->parent_column}, where, out);
                    }
                }
            } else if (p.join) {
                out.push_back(error_at(where, "join condition on a non-join object"));
            }
            if (const auto* fn = std::get_if<FunctionCall>(&p.object)) {
                if (!registry.contains(fn->name))
                    out.push_back(error_at(where, "unknown function '" + fn->name + "'"));
            }
        }
    }

    // Metadata: one entry per source, no dangling urls, key columns exist,
    // annotation consistency.
    std::set<std::string> md_urls;
    for (const auto& table : vtd.metadata.tables) {
        const std::string where = "metadata:" + table.url;
        if (!md_urls.insert(table.url).second)
            out.push_back(error_at(where, "more than one metadata entry for source"));
        const auto* src = vtd.source(table.url);
        if (!src) {
            out.push_back(error_at(where, "metadata references missing source '" + table.url + "'"));
            continue;
        }
        if (table.primary_key) check_columns_exist(*src, *table.primary_key, where, out);
        for (const auto& fk : table.foreign_keys) {
            check_columns_exist(*src, fk.columns, where, out);
            if (fk.columns.size() != fk.referenced_columns.size())
                out.push_back(error_at(where, "foreign key column count mismatch"));
        }
        for (const auto& col : table.columns) {
            if (src->column_index(col.name) < 0)
                out.push_back(error_at(where, "unknown column '" + col.name + "' in " + src->path));
            if (col.separator && col.datatype != Datatype::String)
                out.push_back(error_at(where, "separator on non-string column '" + col.name + "'"));
            if (col.minimum && col.maximum && *col.minimum > *col.maximum)
                out.push_back(error_at(where, "minimum exceeds maximum on '" + col.name + "'"));
        }
    }

    return out;
}

}  // namespace obda
