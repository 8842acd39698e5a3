// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <set>
#include <thread>

namespace obda {

namespace {

bool subset(const std::set<std::string>& inner, const std::vector<std::string>& outer) {
    for (const auto& p : inner)
        if (std::find(outer.begin(), outer.end(), p) == outer.end()) return false;
    return true;
}

std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    auto begin = slash == std::string::npos ? 0 : slash + 1;
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos || dot < begin) dot = path.size();
    return path.substr(begin, dot - begin);
}

}  // namespace

std::string snake_case_label(const std::string& label) {
    std::string out;
    for (std::size_t i = 0; i < label.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(label[i]);
        if (std::isupper(c) && i > 0 &&
            std::islower(static_cast<unsigned char>(label[i - 1])))
            out.push_back('_');
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::vector<const TriplesMap*> matching_maps(const sparql::Ssg& ssg, const MappingDocument& m) {
    const auto& wanted =
        ssg.required_predicates.empty() ? ssg.predicates : ssg.required_predicates;
    std::vector<const TriplesMap*> out;
    for (const auto& tm : m.triples_maps) {
        if (ssg.required_class && (!tm.class_iri || *tm.class_iri != *ssg.required_class)) continue;
        auto provided = tm.provided_predicates();
        if (subset(wanted, provided)) out.push_back(&tm);
    }
    return out;
}

Selection select_annotations(const sparql::Query& q, const MappingDocument& m,
                             const MetadataDocument& md) {
    auto ssgs = build_ssgs(q);

    std::set<std::string> kept_ids;
    std::map<std::string, std::set<std::string>> kept_preds;  // tm id -> predicates to keep

    for (const auto& ssg : ssgs.groups) {
        auto matched = matching_maps(ssg, m);
        if (matched.empty()) {
            std::string preds;
            for (const auto& p : ssg.predicates) preds += (preds.empty() ? "" : ", ") + p;
            raise(ErrorKind::NoMatchingTriplesMap,
                  "no triples map provides the predicates of subject '" +
                      ssg.subject.value + "' {" + preds + "}");
        }
        for (const auto* tm : matched) {
            kept_ids.insert(tm->id);
            auto& preds = kept_preds[tm->id];
            for (const auto& p : ssg.predicates) preds.insert(p);
        }
    }

    // Maps matched by a group directly; pure join targets are added on
    // top of these so kept join references always resolve.
    const std::set<std::string> matched_ids = kept_ids;

    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& tm : m.triples_maps) {
            if (!kept_ids.count(tm.id)) continue;
            auto preds_it = kept_preds.find(tm.id);
            for (const auto& p : tm.pom) {
                const auto* join = std::get_if<JoinRef>(&p.object);
                if (!join || kept_ids.count(join->parent_tm_id)) continue;
                bool queried = preds_it != kept_preds.end() &&
                               preds_it->second.count(p.predicate) > 0;
                if (queried) {
                    kept_ids.insert(join->parent_tm_id);
                    grew = true;
                }
            }
        }
    }

    Selection out;
    SelectionPlan& plan = out.plan;
    plan.kept_tm_ids = kept_ids;

    std::map<std::string, std::set<std::string>> inbound_parent_columns;

    for (const auto& tm : m.triples_maps) {
        if (!kept_ids.count(tm.id)) continue;
        TriplesMap kept = tm;
        kept.pom.clear();
        auto preds_it = kept_preds.find(tm.id);
        const bool matched = matched_ids.count(tm.id) > 0;
        for (const auto& p : tm.pom) {
            bool keep = preds_it != kept_preds.end() && preds_it->second.count(p.predicate) > 0;
            if (const auto* join = std::get_if<JoinRef>(&p.object)) {
                // a join connecting two kept maps survives pruning
                if (matched && kept_ids.count(join->parent_tm_id)) keep = true;
                if (keep && p.join) {
                    const auto* parent = m.find(join->parent_tm_id);
                    if (parent)
                        inbound_parent_columns[parent->source_path].insert(p.join->parent_column);
                }
            }
            if (keep) kept.pom.push_back(p);
        }
        std::set<std::string> kept_predicates;
        for (const auto& p : kept.pom) kept_predicates.insert(p.predicate);
        plan.kept_pom_per_tm[tm.id] = std::move(kept_predicates);
        out.mapping.triples_maps.push_back(std::move(kept));
    }

    for (const auto& tm : out.mapping.triples_maps) {
        auto& cols = plan.kept_columns_per_source[tm.source_path];
        for (const auto& c : tm.referenced_columns()) cols.insert(c);
    }
    for (const auto& [path, cols] : inbound_parent_columns) {
        auto& target = plan.kept_columns_per_source[path];
        target.insert(cols.begin(), cols.end());
    }

    for (const auto& tm : m.triples_maps)
        if (!plan.kept_columns_per_source.count(tm.source_path))
            plan.discarded_sources.insert(tm.source_path);

    // Only relevant metadata annotations survive: kept sources, kept
    // columns, keys that remain fully covered.
    for (const auto& table : md.tables) {
        auto it = plan.kept_columns_per_source.find(table.url);
        if (it == plan.kept_columns_per_source.end()) continue;
        const auto& kept_cols = it->second;
        TableMetadata filtered = table;
        filtered.columns.clear();
        for (const auto& col : table.columns)
            if (kept_cols.count(col.name)) filtered.columns.push_back(col);
        if (filtered.primary_key) {
            for (const auto& c : *filtered.primary_key)
                if (!kept_cols.count(c)) {
                    filtered.primary_key.reset();
                    break;
                }
        }
        filtered.foreign_keys.clear();
        for (const auto& fk : table.foreign_keys) {
            bool ok = std::all_of(fk.columns.begin(), fk.columns.end(),
                                  [&](const std::string& c) { return kept_cols.count(c) > 0; });
            auto ref = plan.kept_columns_per_source.find(fk.referenced_table);
            ok = ok && ref != plan.kept_columns_per_source.end() &&
                 std::all_of(fk.referenced_columns.begin(), fk.referenced_columns.end(),
                             [&](const std::string& c) { return ref->second.count(c) > 0; });
            if (ok) filtered.foreign_keys.push_back(fk);
        }
        out.metadata.tables.push_back(std::move(filtered));
    }

    return out;
}

std::vector<TabularSource> select_sources(const MappingDocument& m,
                                          const std::vector<TabularSource>& sources,
                                          const SelectionPlan& plan) {
    (void)m;
    std::vector<TabularSource> out;
    for (const auto& src : sources) {
        auto it = plan.kept_columns_per_source.find(src.path);
        if (it == plan.kept_columns_per_source.end()) continue;
        const auto& kept = it->second;
        TabularSource projected;
        projected.path = src.path;
        std::vector<std::size_t> indices;
        for (std::size_t i = 0; i < src.columns.size(); ++i) {
            if (kept.count(src.columns[i])) {
                projected.columns.push_back(src.columns[i]);
                indices.push_back(i);
            }
        }
        projected.rows.reserve(src.rows.size());
        for (const auto& row : src.rows) {
            Row slim;
            slim.reserve(indices.size());
            for (auto i : indices) slim.push_back(row[i]);
            projected.rows.push_back(std::move(slim));
        }
        out.push_back(std::move(projected));
    }
    return out;
}

namespace {

void resort(ConstraintSet& constraints) {
    std::stable_sort(constraints.constraints.begin(), constraints.constraints.end(),
                     [](const Constraint& a, const Constraint& b) { return a.phase() < b.phase(); });
}

/// Moves column-scoped constraints from (source, column) to a new target.
void retarget_column_constraints(ConstraintSet& constraints, const std::string& source,
                                 const std::string& column, const std::string& new_source,
                                 const std::string& new_column) {
    for (auto& c : constraints.constraints) {
        if (c.source != source || c.columns != std::vector<std::string>{column}) continue;
        switch (c.kind) {
            case ConstraintKind::Substitution:
            case ConstraintKind::Datatype:
            case ConstraintKind::Format:
            case ConstraintKind::NullMarkers:
            case ConstraintKind::Default:
            case ConstraintKind::Range:
            case ConstraintKind::IndexCandidate:
                c.source = new_source;
                c.columns = {new_column};
                break;
            default:
                break;
        }
    }
}

}  // namespace

void split(VirtualTabularDataset& vtd, ConstraintSet& constraints, const Constraint& c) {
    const auto* payload = std::get_if<SeparatorPayload>(&c.payload);
    if (!payload || c.columns.size() != 1)
        raise(ErrorKind::InvalidInput, "split expects a separator constraint on one column");
    auto* parent = vtd.source_mut(c.source);
    if (!parent) return;  // source not selected
    int col = parent->column_index(c.columns[0]);
    if (col < 0) return;

    const std::string child_path = stem_of(c.source) + "__" + c.columns[0] + ".csv";
    TabularSource child;
    child.path = child_path;
    child.columns = {"surrogate_id", "value"};

    for (std::size_t r = 0; r < parent->rows.size(); ++r) {
        auto& cell = parent->rows[r][static_cast<std::size_t>(col)];
        const std::string surrogate = std::to_string(r + 1);
        if (cell && !cell->empty()) {
            std::size_t pos = 0;
            const std::string& value = *cell;
            while (pos <= value.size()) {
                auto sep = value.find(payload->separator, pos);
                std::string token = value.substr(pos, sep == std::string::npos ? std::string::npos
                                                                               : sep - pos);
                if (!token.empty()) child.rows.push_back({Cell{surrogate}, Cell{token}});
                if (sep == std::string::npos) break;
                pos = sep + 1;
            }
        }
        cell = surrogate;
    }

    // Insert the child right after its parent, keep deterministic order.
    const std::string tm_t_id = stem_of(c.source) + "__" + c.columns[0];
    for (std::size_t i = 0; i < vtd.sources.size(); ++i) {
        if (vtd.sources[i].path == c.source) {
            vtd.sources.insert(vtd.sources.begin() + static_cast<long>(i) + 1, std::move(child));
            break;
        }
    }

    TriplesMap tm_t;
    tm_t.id = tm_t_id;
    tm_t.source_path = child_path;
    tm_t.subject_template = Template::parse("$(value)");
    vtd.mapping.triples_maps.push_back(tm_t);

    for (auto& tm : vtd.mapping.triples_maps) {
        if (tm.source_path != c.source) continue;
        for (auto& p : tm.pom) {
            const auto* ref = std::get_if<ColumnReference>(&p.object);
            if (!ref || ref->column != c.columns[0]) continue;
            p.object = JoinRef{tm_t_id};
            p.join = JoinCondition{c.columns[0], "surrogate_id"};
        }
    }

    retarget_column_constraints(constraints, c.source, c.columns[0], child_path, "value");
    constraints.constraints.push_back({ConstraintKind::Datatype, c.source, {c.columns[0]},
                                       DatatypePayload{Datatype::Integer}});
    constraints.constraints.push_back({ConstraintKind::Datatype, child_path, {"surrogate_id"},
                                       DatatypePayload{Datatype::Integer}});
    constraints.constraints.push_back({ConstraintKind::IndexCandidate, c.source, {c.columns[0]},
                                       IndexCandidatePayload{"split join child"}});
    constraints.constraints.push_back({ConstraintKind::IndexCandidate, child_path,
                                       {"surrogate_id"},
                                       IndexCandidatePayload{"split join parent"}});
    resort(constraints);
}

void cut(VirtualTabularDataset& vtd, ConstraintSet& constraints, const Constraint& c) {
    const auto* payload = std::get_if<MultiEntityPayload>(&c.payload);
    if (!payload) raise(ErrorKind::InvalidInput, "cut expects a multi-entity constraint");
    auto* src = vtd.source_mut(c.source);
    auto* tm_a = const_cast<TriplesMap*>(vtd.mapping.find(payload->tm_a));
    auto* tm_b = const_cast<TriplesMap*>(vtd.mapping.find(payload->tm_b));
    if (!src || !tm_a || !tm_b) return;  // selection dropped a side
    if (tm_a->source_path != c.source || tm_b->source_path != c.source) return;

    std::set<std::string> links(payload->link_columns.begin(), payload->link_columns.end());
    auto entity_columns = [&](const TriplesMap& tm) {
        std::set<std::string> cols = links;
        for (const auto& col : tm.referenced_columns()) cols.insert(col);
        return cols;
    };
    auto cols_a = entity_columns(*tm_a);
    auto cols_b = entity_columns(*tm_b);
    for (const auto& col : cols_a)
        if (src->column_index(col) < 0) return;  // already decomposed, asserted defensively
    for (const auto& col : cols_b)
        if (src->column_index(col) < 0) return;

    auto project = [&](const std::set<std::string>& keep, const std::string& path) {
        TabularSource out;
        out.path = path;
        std::vector<std::size_t> indices;
        for (std::size_t i = 0; i < src->columns.size(); ++i)
            if (keep.count(src->columns[i])) {
                out.columns.push_back(src->columns[i]);
                indices.push_back(i);
            }
        for (const auto& row : src->rows) {
            Row slim;
            for (auto i : indices) slim.push_back(row[i]);
            out.rows.push_back(std::move(slim));
        }
        return out;
    };

    std::string b_path;
    if (tm_b->class_iri) {
        auto hash = tm_b->class_iri->find_last_of("#/");
        std::string local = hash == std::string::npos ? *tm_b->class_iri
                                                      : tm_b->class_iri->substr(hash + 1);
        b_path = snake_case_label(local) + ".csv";
    } else {
        b_path = stem_of(c.source) + "__" + tm_b->id + ".csv";
    }
    if (vtd.source(b_path)) b_path = stem_of(c.source) + "__" + tm_b->id + ".csv";

    TabularSource side_a = project(cols_a, c.source);
    TabularSource side_b = project(cols_b, b_path);
    *src = std::move(side_a);
    for (std::size_t i = 0; i < vtd.sources.size(); ++i) {
        if (vtd.sources[i].path == c.source) {
            vtd.sources.insert(vtd.sources.begin() + static_cast<long>(i) + 1, std::move(side_b));
            break;
        }
    }
    tm_b->source_path = b_path;

    // Column-scoped constraints follow their column; link columns exist on
    // both sides, so their constraints are duplicated for the new table.
    std::vector<Constraint> additions;
    for (auto& cn : constraints.constraints) {
        if (cn.source != c.source || cn.columns.size() != 1) continue;
        const std::string& col = cn.columns[0];
        bool in_a = cols_a.count(col) > 0;
        bool in_b = cols_b.count(col) > 0;
        if (in_a && in_b) {
            Constraint copy = cn;
            copy.source = b_path;
            additions.push_back(std::move(copy));
        } else if (in_b) {
            cn.source = b_path;
        }
    }
    for (auto& cn : constraints.constraints) {
        if (cn.source != c.source) continue;
        if (cn.kind == ConstraintKind::CreateColumn) {
            const auto* cc = std::get_if<CreateColumnPayload>(&cn.payload);
            if (cc && cc->tm_id == tm_b->id) cn.source = b_path;
        }
    }
    for (auto& extra : additions) constraints.constraints.push_back(std::move(extra));
    resort(constraints);
}

TabularSource duplicates(const TabularSource& s) {
    TabularSource out;
    out.path = s.path;
    out.columns = s.columns;
    std::set<Row> seen;
    for (const auto& row : s.rows)
        if (seen.insert(row).second) out.rows.push_back(row);
    return out;
}

namespace {

bool is_canonical(const std::string& value, Datatype dt) {
    switch (dt) {
        case Datatype::Date:
            return reformat_temporal(value, "yyyy-MM-dd", Datatype::Date).has_value();
        case Datatype::Time:
            return reformat_temporal(value, "HH:mm:ss", Datatype::Time).has_value();
        case Datatype::DateTime:
            return value.find('T') != std::string::npos &&
                   reformat_temporal(value.substr(0, value.find('T')), "yyyy-MM-dd",
                                     Datatype::Date)
                       .has_value();
        default: {
            auto normalized = normalize_number(value, "#0.#");
            return normalized && *normalized == value;
        }
    }
}

}  // namespace

TabularSource sub(const TabularSource& s, const Constraint& substitution, RangePolicy policy,
                  std::vector<Diagnostic>* warnings) {
    const auto* payload = std::get_if<SubstitutionPayload>(&substitution.payload);
    if (!payload || substitution.columns.size() != 1)
        raise(ErrorKind::InvalidInput, "sub expects a substitution constraint on one column");
    TabularSource out = s;
    int col = out.column_index(substitution.columns[0]);
    if (col < 0) return out;

    for (std::size_t r = 0; r < out.rows.size(); ++r) {
        Cell& cell = out.rows[r][static_cast<std::size_t>(col)];
        if (cell) {
            for (const auto& marker : payload->markers) {
                if (*cell == marker) {
                    cell.reset();
                    break;
                }
            }
        }
        if (!cell && payload->default_value) cell = *payload->default_value;
        if (cell && payload->format) {
            std::optional<std::string> canonical;
            if (is_temporal(payload->datatype)) {
                canonical = reformat_temporal(*cell, *payload->format, payload->datatype);
            } else {
                canonical = normalize_number(*cell, *payload->format);
            }
            if (!canonical && is_canonical(*cell, payload->datatype)) canonical = *cell;
            if (!canonical) {
                std::string msg = s.path + ":" + std::to_string(r + 1) + ":" +
                                  substitution.columns[0] + ": value '" + *cell +
                                  "' does not match format '" + *payload->format + "'";
                if (policy == RangePolicy::Error) raise(ErrorKind::FormatViolation, msg);
                if (warnings) warnings->push_back(warning_at(s.path, msg));
            } else {
                cell = *canonical;
            }
        }
    }
    return out;
}

std::string create(VirtualTabularDataset& vtd, ConstraintSet& constraints, const Constraint& c,
                   const FunctionRegistry& registry) {
    const auto* payload = std::get_if<CreateColumnPayload>(&c.payload);
    if (!payload) raise(ErrorKind::InvalidInput, "create expects a create-column constraint");
    auto* src = vtd.source_mut(c.source);
    auto* tm = const_cast<TriplesMap*>(vtd.mapping.find(payload->tm_id));
    if (!src || !tm) return "";
    if (payload->pom_index >= tm->pom.size()) return "";
    auto& pom = tm->pom[payload->pom_index];
    if (!std::holds_alternative<FunctionCall>(pom.object)) return "";

    int counter = 0;
    for (const auto& existing : src->columns)
        if (existing.rfind("_fn_", 0) == 0) ++counter;
    const std::string column = "_fn_" + std::to_string(counter);

    src->columns.push_back(column);
    for (std::size_t r = 0; r < src->rows.size(); ++r) {
        Cell value = registry.evaluate(payload->function, *src, src->rows[r], r + 1);
        src->rows[r].push_back(std::move(value));
    }

    pom.object = ColumnReference{column};

    if (pom.datatype_hint) {
        if (auto dt = datatype_from_string(*pom.datatype_hint)) {
            constraints.constraints.push_back({ConstraintKind::Datatype, c.source, {column},
                                               DatatypePayload{*dt}});
            resort(constraints);
        }
    }
    return column;
}

void normalize_phase(VirtualTabularDataset& vtd, ConstraintSet& constraints) {
    // 2NF before 3NF; both rewrite the shared mapping and run serialized.
    for (const auto& c : constraints.of_kind(ConstraintKind::Separator2NF)) split(vtd, constraints, *c);
    for (const auto& c : constraints.of_kind(ConstraintKind::MultiEntity3NF)) cut(vtd, constraints, *c);
}

void prepare_phase(VirtualTabularDataset& vtd, ConstraintSet& constraints,
                   const PipelineOptions& options, const FunctionRegistry& registry) {
    // Duplicates then sub, per source, independent across sources.
    // Workers own whole sources; the mapping is not touched.
    auto prepare_one = [&](TabularSource& src) {
        src = duplicates(src);
        for (const auto& c : constraints.for_source(src.path)) {
            if (c->kind == ConstraintKind::Substitution)
                src = sub(src, *c, options.range_policy, options.warnings);
        }
    };
    unsigned jobs = std::max(1u, options.jobs);
    if (jobs <= 1 || vtd.sources.size() <= 1) {
        for (auto& src : vtd.sources) prepare_one(src);
    } else {
        std::vector<std::thread> workers;
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (unsigned w = 0; w < std::min<std::size_t>(jobs, vtd.sources.size()); ++w) {
            workers.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= vtd.sources.size()) break;
                    try {
                        prepare_one(vtd.sources[i]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : workers) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    // Transformation functions last; they rewrite the mapping, serialized.
    for (const auto& c : constraints.of_kind(ConstraintKind::CreateColumn))
        create(vtd, constraints, *c, registry);
}

void apply_pipeline(VirtualTabularDataset& vtd, ConstraintSet& constraints,
                    const PipelineOptions& options, const FunctionRegistry& registry) {
    normalize_phase(vtd, constraints);
    prepare_phase(vtd, constraints, options, registry);
}

}  // namespace obda
