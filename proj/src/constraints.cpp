// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/constraints.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace obda {

const char* to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::PrimaryKey: return "primaryKey";
        case ConstraintKind::ForeignKey: return "foreignKey";
        case ConstraintKind::NotNull: return "notNull";
        case ConstraintKind::Datatype: return "datatype";
        case ConstraintKind::Format: return "format";
        case ConstraintKind::Range: return "range";
        case ConstraintKind::Default: return "default";
        case ConstraintKind::NullMarkers: return "nullMarkers";
        case ConstraintKind::Separator2NF: return "separator2NF";
        case ConstraintKind::MultiEntity3NF: return "multiEntity3NF";
        case ConstraintKind::Substitution: return "substitution";
        case ConstraintKind::CreateColumn: return "createColumn";
        case ConstraintKind::IndexCandidate: return "indexCandidate";
    }
    return "?";
}

int Constraint::phase() const {
    switch (kind) {
        case ConstraintKind::Separator2NF: return 0;
        case ConstraintKind::MultiEntity3NF: return 1;
        case ConstraintKind::Substitution: return 2;
        case ConstraintKind::CreateColumn: return 3;
        case ConstraintKind::PrimaryKey:
        case ConstraintKind::ForeignKey:
        case ConstraintKind::Datatype:
        case ConstraintKind::Format:
        case ConstraintKind::NotNull:
        case ConstraintKind::Range:
        case ConstraintKind::Default:
        case ConstraintKind::NullMarkers: return 4;
        case ConstraintKind::IndexCandidate: return 5;
    }
    return 4;
}

std::vector<const Constraint*> ConstraintSet::of_kind(ConstraintKind kind) const {
    std::vector<const Constraint*> out;
    for (const auto& c : constraints)
        if (c.kind == kind) out.push_back(&c);
    return out;
}

std::vector<const Constraint*> ConstraintSet::for_source(const std::string& path) const {
    std::vector<const Constraint*> out;
    for (const auto& c : constraints)
        if (c.source == path) out.push_back(&c);
    return out;
}

namespace {

/// Columns linking two triples maps on the same source: explicit join
/// condition references plus columns of textually identical templates
/// (subject-subject or object-subject).
std::set<std::string> link_columns(const TriplesMap& a, const TriplesMap& b) {
    std::set<std::string> out;
    auto add_template = [&out](const Template& t) {
        for (const auto& c : t.columns()) out.insert(c);
    };
    if (a.subject_template == b.subject_template) add_template(a.subject_template);
    for (const auto* tm : {&a, &b}) {
        const auto* other = tm == &a ? &b : &a;
        for (const auto& p : tm->pom) {
            if (const auto* join = std::get_if<JoinRef>(&p.object)) {
                if (join->parent_tm_id == other->id && p.join) {
                    out.insert(p.join->child_column);
                    out.insert(p.join->parent_column);
                }
            } else if (const auto* tpl = std::get_if<Template>(&p.object)) {
                if (*tpl == other->subject_template) add_template(*tpl);
            }
        }
    }
    return out;
}

}  // namespace

ConstraintSet extract_constraints(const MappingDocument& m, const MetadataDocument& md) {
    std::vector<Constraint> out;

    // Sources a triples map will load; foreign keys into anything else
    // cannot be enforced and are dropped.
    std::set<std::string> mapped_sources;
    for (const auto& tm : m.triples_maps) mapped_sources.insert(tm.source_path);

    std::set<std::string> pk_sources;
    for (const auto& table : md.tables) {
        if (table.primary_key) {
            if (!pk_sources.insert(table.url).second)
                raise(ErrorKind::ConflictingConstraint,
                      "two primary keys declared for '" + table.url + "'");
            out.push_back({ConstraintKind::PrimaryKey, table.url, *table.primary_key, {}});
        }
        for (const auto& fk : table.foreign_keys) {
            if (!mapped_sources.count(fk.referenced_table)) continue;
            if (const auto* ref_md = md.table(fk.referenced_table); ref_md && !ref_md->columns.empty()) {
                for (const auto& col : fk.referenced_columns)
                    if (!ref_md->column(col))
                        raise(ErrorKind::ConflictingConstraint,
                              "foreign key of '" + table.url + "' references column '" + col +
                                  "' absent from metadata of '" + fk.referenced_table + "'");
            }
            out.push_back({ConstraintKind::ForeignKey, table.url, fk.columns,
                           ForeignKeyPayload{fk.referenced_table, fk.referenced_columns}});
        }
        for (const auto& col : table.columns) {
            const std::vector<std::string> target{col.name};
            out.push_back({ConstraintKind::Datatype, table.url, target,
                           DatatypePayload{col.datatype}});
            if (col.format)
                out.push_back({ConstraintKind::Format, table.url, target,
                               FormatPayload{*col.format, col.datatype}});
            if (col.required)
                out.push_back({ConstraintKind::NotNull, table.url, target, {}});
            if (col.default_value)
                out.push_back({ConstraintKind::Default, table.url, target,
                               DefaultPayload{*col.default_value}});
            if (!col.null_markers.empty())
                out.push_back({ConstraintKind::NullMarkers, table.url, target,
                               NullMarkersPayload{col.null_markers}});
            if (col.minimum || col.maximum)
                out.push_back({ConstraintKind::Range, table.url, target,
                               RangePayload{col.minimum, col.maximum}});
            if (col.separator)
                out.push_back({ConstraintKind::Separator2NF, table.url, target,
                               SeparatorPayload{*col.separator}});
            if (col.format || col.default_value || !col.null_markers.empty())
                out.push_back({ConstraintKind::Substitution, table.url, target,
                               SubstitutionPayload{col.null_markers, col.default_value, col.format,
                                                   col.datatype}});
        }
    }

    // Datatype fallback: an object column without metadata takes the POM's
    // datatype hint.
    std::set<std::pair<std::string, std::string>> typed;
    for (const auto& c : out)
        if (c.kind == ConstraintKind::Datatype) typed.insert({c.source, c.columns[0]});
    for (const auto& tm : m.triples_maps) {
        for (const auto& p : tm.pom) {
            if (!p.datatype_hint) continue;
            const auto* col = std::get_if<ColumnReference>(&p.object);
            if (!col) continue;
            auto key = std::make_pair(tm.source_path, col->column);
            if (typed.count(key)) continue;
            auto dt = datatype_from_string(*p.datatype_hint);
            if (!dt) continue;
            typed.insert(key);
            out.push_back({ConstraintKind::Datatype, tm.source_path, {col->column},
                           DatatypePayload{*dt}});
        }
    }

    // Multi-entity sources: two maps over one file overlapping only in the
    // references that link them.
    for (std::size_t i = 0; i < m.triples_maps.size(); ++i) {
        for (std::size_t j = i + 1; j < m.triples_maps.size(); ++j) {
            const auto& a = m.triples_maps[i];
            const auto& b = m.triples_maps[j];
            if (a.source_path != b.source_path) continue;
            auto cols_a = a.referenced_columns();
            auto cols_b = b.referenced_columns();
            std::set<std::string> set_a(cols_a.begin(), cols_a.end());
            std::set<std::string> intersection;
            for (const auto& c : cols_b)
                if (set_a.count(c)) intersection.insert(c);
            if (intersection.empty()) continue;
            auto links = link_columns(a, b);
            if (links.empty() || intersection != links) continue;
            std::vector<std::string> link_list(links.begin(), links.end());
            out.push_back({ConstraintKind::MultiEntity3NF, a.source_path, link_list,
                           MultiEntityPayload{a.id, b.id, link_list}});
        }
    }

    // Transformation functions pushed down as column creation.
    for (const auto& tm : m.triples_maps) {
        for (std::size_t pi = 0; pi < tm.pom.size(); ++pi) {
            const auto* fn = std::get_if<FunctionCall>(&tm.pom[pi].object);
            if (!fn) continue;
            out.push_back({ConstraintKind::CreateColumn, tm.source_path, fn->columns(),
                           CreateColumnPayload{tm.id, pi, *fn}});
        }
    }

    // Join condition references become index candidates; whether an index
    // is created is decided later from their selectivity.
    std::set<std::pair<std::string, std::string>> seen_candidates;
    for (const auto& tm : m.triples_maps) {
        for (const auto& p : tm.pom) {
            const auto* join = std::get_if<JoinRef>(&p.object);
            if (!join || !p.join) continue;
            const auto* parent = m.find(join->parent_tm_id);
            if (!parent) continue;
            if (seen_candidates.insert({tm.source_path, p.join->child_column}).second)
                out.push_back({ConstraintKind::IndexCandidate, tm.source_path,
                               {p.join->child_column},
                               IndexCandidatePayload{"join child of " + tm.id}});
            if (seen_candidates.insert({parent->source_path, p.join->parent_column}).second)
                out.push_back({ConstraintKind::IndexCandidate, parent->source_path,
                               {p.join->parent_column},
                               IndexCandidatePayload{"join parent of " + tm.id}});
        }
    }

    ConstraintSet set;
    set.constraints = std::move(out);
    std::stable_sort(set.constraints.begin(), set.constraints.end(),
                     [](const Constraint& a, const Constraint& b) { return a.phase() < b.phase(); });
    return set;
}

std::string constraints_to_json(const ConstraintSet& set) {
    using nlohmann::json;
    json arr = json::array();
    for (const auto& c : set.constraints) {
        json entry;
        entry["kind"] = to_string(c.kind);
        entry["source"] = c.source;
        entry["columns"] = c.columns;
        std::visit(
            [&entry](const auto& payload) {
                using T = std::decay_t<decltype(payload)>;
                if constexpr (std::is_same_v<T, ForeignKeyPayload>) {
                    entry["referencedTable"] = payload.referenced_table;
                    entry["referencedColumns"] = payload.referenced_columns;
                } else if constexpr (std::is_same_v<T, DatatypePayload>) {
                    entry["datatype"] = to_string(payload.datatype);
                } else if constexpr (std::is_same_v<T, FormatPayload>) {
                    entry["pattern"] = payload.pattern;
                    entry["datatype"] = to_string(payload.datatype);
                } else if constexpr (std::is_same_v<T, RangePayload>) {
                    if (payload.minimum) entry["minimum"] = *payload.minimum;
                    if (payload.maximum) entry["maximum"] = *payload.maximum;
                } else if constexpr (std::is_same_v<T, DefaultPayload>) {
                    entry["default"] = payload.value;
                } else if constexpr (std::is_same_v<T, NullMarkersPayload>) {
                    entry["markers"] = payload.markers;
                } else if constexpr (std::is_same_v<T, SeparatorPayload>) {
                    entry["separator"] = std::string(1, payload.separator);
                } else if constexpr (std::is_same_v<T, MultiEntityPayload>) {
                    entry["maps"] = {payload.tm_a, payload.tm_b};
                    entry["linkColumns"] = payload.link_columns;
                } else if constexpr (std::is_same_v<T, SubstitutionPayload>) {
                    if (!payload.markers.empty()) entry["markers"] = payload.markers;
                    if (payload.default_value) entry["default"] = *payload.default_value;
                    if (payload.format) entry["format"] = *payload.format;
                    entry["datatype"] = to_string(payload.datatype);
                } else if constexpr (std::is_same_v<T, CreateColumnPayload>) {
                    entry["map"] = payload.tm_id;
                    entry["pomIndex"] = payload.pom_index;
                    entry["function"] = payload.function.name;
                } else if constexpr (std::is_same_v<T, IndexCandidatePayload>) {
                    entry["reason"] = payload.reason;
                }
            },
            c.payload);
        arr.push_back(entry);
    }
    return arr.dump(2) + "\n";
}

}  // namespace obda
