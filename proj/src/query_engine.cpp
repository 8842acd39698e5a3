// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/query_engine.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace obda {

using sparql::FilterExpr;
using sparql::Query;
using sparql::Term;
using sparql::TriplePattern;

namespace {

std::string sql_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

bool literal_is_numeric(const Term& t) {
    if (t.numeric) return true;
    if (t.datatype) {
        auto hash = t.datatype->find_last_of("#/");
        std::string local = hash == std::string::npos ? *t.datatype : t.datatype->substr(hash + 1);
        if (auto dt = datatype_from_string(local)) return is_numeric(*dt);
    }
    return false;
}

/// A SQL expression with its declared type, plus template provenance for
/// key-based join reduction.
struct Expr {
    std::string sql;
    Datatype type = Datatype::String;
    bool typed = false;
    std::optional<std::string> template_pattern;
    std::vector<std::string> key_sql;  // template argument columns
};

bool numeric_class(const Expr& e) { return e.typed && (is_numeric(e.type) || e.type == Datatype::Boolean); }

/// One derived table in the generated query.
struct Relation {
    std::string alias;
    std::string sql;  // subquery text
    bool nullable = false;
    // var -> output column ("v_<var>"), type info, and when every branch
    // agreed, the template signature with key columns ("sk_<var>_<i>").
    struct VarOut {
        std::string column;
        Datatype type = Datatype::String;
        bool typed = false;
        std::optional<std::string> template_pattern;
        std::vector<std::string> key_columns;
    };
    std::map<std::string, VarOut> vars;
};

struct Branch {
    std::string from_text;
    std::vector<std::string> conditions;
    std::map<std::string, Expr> var_exprs;
    bool possible = true;
};

class Translator {
public:
    Translator(const Query& q, const MappingDocument& m, const DdlScript& ddl,
               const TranslateOptions& options)
        : query_(q), mapping_(m), ddl_(ddl), options_(options) {}

    SqlQuery translate() {
        // Required patterns grouped by subject, in order of appearance.
        auto required_groups = group_by_subject(query_.bgp);
        Relation required = required_groups.empty() ? unit_relation()
                                                    : conjunction(required_groups, "g");
        required.alias = "r";
        relations_.push_back(std::move(required));

        int opt_index = 0;
        for (const auto& clause : query_.optionals) {
            auto groups = group_by_subject(clause);
            Relation rel = conjunction(groups, "q" + std::to_string(opt_index));
            rel.alias = "o" + std::to_string(opt_index);
            rel.nullable = true;
            relations_.push_back(std::move(rel));
            ++opt_index;
        }

        std::string sql = "SELECT ";
        if (query_.distinct) sql += "DISTINCT ";
        SqlQuery out;
        auto projection = query_.projection();
        for (std::size_t i = 0; i < projection.size(); ++i) {
            if (i) sql += ", ";
            sql += resolve(projection[i]).sql + " AS v_" + projection[i];
            out.projection.emplace_back(projection[i], "v_" + projection[i]);
        }
        if (projection.empty()) sql += "1 AS v__one";

        sql += "\nFROM (" + relations_[0].sql + ") " + relations_[0].alias;
        for (std::size_t i = 1; i < relations_.size(); ++i) {
            const Relation& rel = relations_[i];
            sql += "\nLEFT JOIN (" + rel.sql + ") " + rel.alias + " ON " +
                   optional_join_condition(i);
        }

        std::vector<std::string> where;
        for (const auto& f : query_.filters) where.push_back(compile_filter(f));
        if (!where.empty()) {
            sql += "\nWHERE ";
            for (std::size_t i = 0; i < where.size(); ++i) {
                if (i) sql += " AND ";
                sql += "(" + where[i] + ")";
            }
        }

        if (!query_.order_by.empty()) {
            sql += "\nORDER BY ";
            for (std::size_t i = 0; i < query_.order_by.size(); ++i) {
                if (i) sql += ", ";
                sql += resolve(query_.order_by[i].variable).sql +
                       (query_.order_by[i].ascending ? " ASC" : " DESC");
            }
        }
        if (query_.limit) sql += "\nLIMIT " + std::to_string(*query_.limit);
        if (query_.offset) {
            if (!query_.limit) sql += "\nLIMIT -1";
            sql += " OFFSET " + std::to_string(*query_.offset);
        }

        out.text = sql;
        return out;
    }

private:
    /// Patterns sharing a subject term, grouped in first-appearance order.
    static std::vector<std::vector<TriplePattern>> group_by_subject(
        const std::vector<TriplePattern>& patterns) {
        std::vector<std::vector<TriplePattern>> groups;
        std::vector<Term> subjects;
        for (const auto& p : patterns) {
            std::size_t idx = 0;
            for (; idx < subjects.size(); ++idx)
                if (subjects[idx] == p.subject) break;
            if (idx == subjects.size()) {
                subjects.push_back(p.subject);
                groups.emplace_back();
            }
            groups[idx].push_back(p);
        }
        return groups;
    }

    Relation unit_relation() {
        Relation rel;
        rel.sql = "SELECT 1 AS v__one";
        return rel;
    }

    const TableDef* table_for(const TriplesMap& tm) const {
        if (const auto* t = ddl_.table(tm.source_path)) return t;
        return ddl_.table_for_source(tm.source_path);
    }

    Expr render_template(const Template& tpl, const std::string& alias, const TableDef& table) {
        Expr out;
        out.template_pattern = tpl.pattern;
        std::vector<std::string> pieces;
        for (const auto& part : tpl.parts) {
            if (part.is_column) {
                const auto* col = table.by_source_column(part.text);
                if (!col)
                    raise(ErrorKind::UnmappedSource,
                          "template references unknown column '" + part.text + "' of " + table.name);
                pieces.push_back(alias + "." + col->name);
                out.key_sql.push_back(alias + "." + col->name);
            } else {
                pieces.push_back(sql_quote(part.text));
            }
        }
        if (pieces.empty()) {
            out.sql = sql_quote("");
        } else if (pieces.size() == 1 && tpl.is_single_column()) {
            out.sql = pieces[0];
            const auto* col = table.by_source_column(tpl.parts[0].text);
            out.type = col->type;
            out.typed = col->typed;
        } else {
            std::string sql;
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                if (i) sql += " || ";
                sql += pieces[i];
            }
            out.sql = sql;
        }
        return out;
    }

    /// Object constant against a column/template expression; generated as
    /// a type-honest predicate (a numeric column never equals a string
    /// literal, so that comparison collapses to FALSE).
    std::string constant_condition(const Expr& expr, const Term& object) {
        if (options_.comparison == ComparisonMode::Lexical)
            return "CAST(" + expr.sql + " AS TEXT) = " + sql_quote(object.value);
        if (object.kind == Term::Kind::Iri) {
            if (numeric_class(expr)) return "1=0";
            return expr.sql + " = " + sql_quote(object.value);
        }
        const bool lit_numeric = literal_is_numeric(object);
        if (numeric_class(expr) && lit_numeric) return expr.sql + " = " + object.value;
        if (!numeric_class(expr) && !lit_numeric)
            return expr.sql + " = " + sql_quote(object.value);
        return "1=0";
    }

    std::optional<Branch> build_branch(const std::vector<TriplePattern>& patterns,
                                       const TriplesMap& tm, const std::string& alias) {
        const TableDef* table = table_for(tm);
        if (!table)
            raise(ErrorKind::UnmappedSource, "mapping:" + tm.id + ": no table for '" +
                                                 tm.source_path + "'");
        Branch branch;
        branch.from_text = table->name + " " + alias;
        int parent_count = 0;

        Expr subject = render_template(tm.subject_template, alias, *table);
        if (!subject.key_sql.empty()) branch.conditions.push_back(subject.sql + " IS NOT NULL");

        auto bind = [&branch](const std::string& var, const Expr& expr) {
            auto it = branch.var_exprs.find(var);
            if (it != branch.var_exprs.end()) {
                branch.conditions.push_back(it->second.sql + " = " + expr.sql);
            } else {
                branch.var_exprs[var] = expr;
            }
        };

        const Term& subject_term = patterns[0].subject;
        if (subject_term.kind == Term::Kind::Variable) {
            bind(subject_term.value, subject);
        } else {
            branch.conditions.push_back(constant_condition(subject, subject_term));
        }

        for (const auto& p : patterns) {
            if (p.predicate.value == kRdfType) {
                if (!tm.class_iri) return std::nullopt;
                Expr class_expr;
                class_expr.sql = sql_quote(*tm.class_iri);
                if (p.object.kind == Term::Kind::Variable) {
                    bind(p.object.value, class_expr);
                } else if (p.object.kind == Term::Kind::Iri) {
                    if (p.object.value != *tm.class_iri) return std::nullopt;
                } else {
                    return std::nullopt;
                }
                continue;
            }

            const PredicateObjectMap* pom = nullptr;
            for (const auto& candidate : tm.pom)
                if (candidate.predicate == p.predicate.value) {
                    pom = &candidate;
                    break;
                }
            if (!pom) return std::nullopt;

            Expr object;
            if (const auto* col = std::get_if<ColumnReference>(&pom->object)) {
                const auto* def = table->by_source_column(col->column);
                if (!def) return std::nullopt;
                object.sql = alias + "." + def->name;
                object.type = def->type;
                object.typed = def->typed;
            } else if (const auto* tpl = std::get_if<Template>(&pom->object)) {
                object = render_template(*tpl, alias, *table);
            } else if (const auto* fn = std::get_if<FunctionCall>(&pom->object)) {
                // Untranslated transformation function: a constraint-free
                // engine sees only the raw column it mentions.
                std::optional<Expr> degraded;
                for (const auto& arg : fn->args) {
                    if (arg.kind == FunctionArg::Kind::Column) {
                        if (const auto* def = table->by_source_column(arg.text)) {
                            degraded = Expr{alias + "." + def->name, def->type, def->typed, {}, {}};
                            break;
                        }
                    }
                }
                if (!degraded) {
                    for (const auto& arg : fn->args)
                        if (arg.kind == FunctionArg::Kind::Constant) {
                            degraded = Expr{sql_quote(arg.text), Datatype::String, false, {}, {}};
                            break;
                        }
                }
                if (!degraded) return std::nullopt;
                object = *degraded;
            } else if (const auto* join = std::get_if<JoinRef>(&pom->object)) {
                const TriplesMap* parent = mapping_.find(join->parent_tm_id);
                if (!parent || !pom->join) return std::nullopt;
                const TableDef* parent_table = table_for(*parent);
                if (!parent_table) return std::nullopt;
                const auto* child_col = table->by_source_column(pom->join->child_column);
                const auto* parent_col = parent_table->by_source_column(pom->join->parent_column);
                if (!child_col || !parent_col) return std::nullopt;
                std::string parent_alias = alias + "p" + std::to_string(parent_count++);
                branch.from_text += " JOIN " + parent_table->name + " " + parent_alias + " ON " +
                                    alias + "." + child_col->name + " = " + parent_alias + "." +
                                    parent_col->name;
                object = render_template(parent->subject_template, parent_alias, *parent_table);
                if (!object.key_sql.empty())
                    branch.conditions.push_back(object.sql + " IS NOT NULL");
            }

            if (p.object.kind == Term::Kind::Variable) {
                branch.conditions.push_back(object.sql + " IS NOT NULL");
                bind(p.object.value, object);
            } else {
                branch.conditions.push_back(constant_condition(object, p.object));
            }
        }
        return branch;
    }

    /// Relation for one star-shaped group: UNION ALL over its matched
    /// maps, with aligned v_/sk_ output columns.
    Relation group_relation(const std::vector<TriplePattern>& patterns,
                            const std::string& alias_prefix) {
        sparql::Ssg ssg;
        ssg.subject = patterns[0].subject;
        for (const auto& p : patterns) {
            ssg.patterns.push_back(p);
            ssg.predicates.insert(p.predicate.value);
            ssg.required_predicates.insert(p.predicate.value);
            if (p.predicate.value == kRdfType && p.object.kind == Term::Kind::Iri)
                ssg.required_class = p.object.value;
        }
        auto maps = matching_maps_local(ssg);

        // Variables this group binds, sorted for deterministic columns.
        std::set<std::string> var_set;
        if (ssg.subject.kind == Term::Kind::Variable) var_set.insert(ssg.subject.value);
        for (const auto& p : patterns)
            if (p.object.kind == Term::Kind::Variable) var_set.insert(p.object.value);
        std::vector<std::string> vars(var_set.begin(), var_set.end());

        std::vector<Branch> branches;
        int branch_index = 0;
        for (const auto* tm : maps) {
            auto branch = build_branch(patterns, *tm,
                                       alias_prefix + "t" + std::to_string(branch_index));
            ++branch_index;
            if (branch) branches.push_back(std::move(*branch));
        }

        Relation rel;
        for (const auto& v : vars) {
            Relation::VarOut out;
            out.column = "v_" + v;
            rel.vars[v] = out;
        }

        if (branches.empty()) {
            std::string sql = "SELECT ";
            for (std::size_t i = 0; i < vars.size(); ++i) {
                if (i) sql += ", ";
                sql += "NULL AS v_" + vars[i];
            }
            if (vars.empty()) sql += "1 AS v__one";
            sql += " WHERE 1=0";
            rel.sql = sql;
            return rel;
        }

        // Template signatures survive only when every branch agrees.
        for (const auto& v : vars) {
            std::optional<std::string> pattern;
            std::size_t keys = 0;
            bool uniform = true;
            Datatype type = Datatype::String;
            bool typed = true;
            for (const auto& b : branches) {
                const auto& e = b.var_exprs.at(v);
                if (&b == &branches.front()) {
                    pattern = e.template_pattern;
                    keys = e.key_sql.size();
                    type = e.type;
                } else {
                    if (e.template_pattern != pattern || e.key_sql.size() != keys) uniform = false;
                    if (e.type != type) typed = false;
                }
                if (!e.typed) typed = false;
            }
            auto& out = rel.vars[v];
            if (uniform && pattern && keys > 0) {
                out.template_pattern = pattern;
                for (std::size_t k = 0; k < keys; ++k)
                    out.key_columns.push_back("sk_" + v + "_" + std::to_string(k));
            }
            if (typed) {
                out.type = type;
                out.typed = true;
            }
        }

        std::string sql;
        for (std::size_t bi = 0; bi < branches.size(); ++bi) {
            const auto& b = branches[bi];
            if (bi) sql += "\nUNION ALL\n";
            sql += "SELECT ";
            bool first = true;
            for (const auto& v : vars) {
                const auto& e = b.var_exprs.at(v);
                if (!first) sql += ", ";
                first = false;
                sql += e.sql + " AS v_" + v;
                const auto& out = rel.vars[v];
                for (std::size_t k = 0; k < out.key_columns.size(); ++k)
                    sql += ", " + e.key_sql[k] + " AS " + out.key_columns[k];
            }
            if (vars.empty()) sql += "1 AS v__one";
            sql += " FROM " + b.from_text;
            if (!b.conditions.empty()) {
                sql += " WHERE ";
                for (std::size_t i = 0; i < b.conditions.size(); ++i) {
                    if (i) sql += " AND ";
                    sql += b.conditions[i];
                }
            }
        }
        rel.sql = sql;
        return rel;
    }

    std::vector<const TriplesMap*> matching_maps_local(const sparql::Ssg& ssg) {
        std::vector<const TriplesMap*> out;
        for (const auto& tm : mapping_.triples_maps) {
            if (ssg.required_class && (!tm.class_iri || *tm.class_iri != *ssg.required_class))
                continue;
            auto provided = tm.provided_predicates();
            bool ok = true;
            for (const auto& p : ssg.required_predicates)
                if (std::find(provided.begin(), provided.end(), p) == provided.end()) ok = false;
            if (ok) out.push_back(&tm);
        }
        if (out.empty()) {
            std::string preds;
            for (const auto& p : ssg.required_predicates)
                preds += (preds.empty() ? "" : ", ") + p;
            raise(ErrorKind::NoMatchingTriplesMap,
                  "no triples map provides {" + preds + "} for subject '" + ssg.subject.value + "'");
        }
        return out;
    }

    /// Inner join of group relations on their shared variables; template
    /// signatures reduce the join to key-column equality.
    Relation conjunction(const std::vector<std::vector<TriplePattern>>& groups,
                         const std::string& alias_prefix) {
        std::vector<Relation> rels;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            Relation rel = group_relation(groups[i], alias_prefix + std::to_string(i));
            rel.alias = alias_prefix + std::to_string(i);
            rels.push_back(std::move(rel));
        }
        if (rels.size() == 1) return std::move(rels[0]);

        Relation out;
        std::string sql;
        std::string from = "(" + rels[0].sql + ") " + rels[0].alias;
        std::map<std::string, std::pair<std::size_t, const Relation::VarOut*>> binder;
        for (const auto& [v, info] : rels[0].vars) binder[v] = {0, &info};

        for (std::size_t i = 1; i < rels.size(); ++i) {
            std::vector<std::string> conds;
            for (const auto& [v, info] : rels[i].vars) {
                auto it = binder.find(v);
                if (it == binder.end()) continue;
                const Relation& prev = rels[it->second.first];
                const auto& prev_info = *it->second.second;
                if (prev_info.template_pattern && info.template_pattern &&
                    *prev_info.template_pattern == *info.template_pattern &&
                    prev_info.key_columns.size() == info.key_columns.size()) {
                    for (std::size_t k = 0; k < info.key_columns.size(); ++k)
                        conds.push_back(prev.alias + "." + prev_info.key_columns[k] + " = " +
                                        rels[i].alias + "." + info.key_columns[k]);
                } else {
                    conds.push_back(prev.alias + "." + prev_info.column + " = " + rels[i].alias +
                                    "." + info.column);
                }
            }
            std::string on = conds.empty() ? "1=1" : "";
            for (std::size_t c = 0; c < conds.size(); ++c) {
                if (c) on += " AND ";
                on += conds[c];
            }
            from += " JOIN (" + rels[i].sql + ") " + rels[i].alias + " ON " + on;
            for (const auto& [v, info] : rels[i].vars)
                if (!binder.count(v)) binder[v] = {i, &info};
        }

        sql = "SELECT ";
        bool first = true;
        // Sorted var output for determinism; key columns propagate upward.
        std::map<std::string, std::pair<std::size_t, const Relation::VarOut*>> ordered(
            binder.begin(), binder.end());
        for (const auto& [v, where] : ordered) {
            const Relation& rel = rels[where.first];
            const auto& info = *where.second;
            if (!first) sql += ", ";
            first = false;
            sql += rel.alias + "." + info.column + " AS " + info.column;
            for (std::size_t k = 0; k < info.key_columns.size(); ++k)
                sql += ", " + rel.alias + "." + info.key_columns[k] + " AS " + info.key_columns[k];
            out.vars[v] = info;
        }
        if (first) sql += "1 AS v__one";
        sql += " FROM " + from;
        out.sql = sql;
        return out;
    }

    /// Join condition for an optional relation against everything before
    /// it; a nullable prior binder compares compatibly (NULL matches).
    std::string optional_join_condition(std::size_t index) {
        const Relation& rel = relations_[index];
        std::vector<std::string> conds;
        for (const auto& [v, info] : rel.vars) {
            for (std::size_t i = 0; i < index; ++i) {
                auto it = relations_[i].vars.find(v);
                if (it == relations_[i].vars.end()) continue;
                const std::string prior = relations_[i].alias + "." + it->second.column;
                const std::string mine = rel.alias + "." + info.column;
                if (relations_[i].nullable)
                    conds.push_back("(" + prior + " IS NULL OR " + prior + " = " + mine + ")");
                else if (it->second.template_pattern && info.template_pattern &&
                         *it->second.template_pattern == *info.template_pattern &&
                         it->second.key_columns.size() == info.key_columns.size()) {
                    for (std::size_t k = 0; k < info.key_columns.size(); ++k)
                        conds.push_back(relations_[i].alias + "." + it->second.key_columns[k] +
                                        " = " + rel.alias + "." + info.key_columns[k]);
                } else {
                    conds.push_back(prior + " = " + mine);
                }
                break;
            }
        }
        if (conds.empty()) return "1=1";
        std::string out;
        for (std::size_t i = 0; i < conds.size(); ++i) {
            if (i) out += " AND ";
            out += conds[i];
        }
        return out;
    }

    /// A variable's value across relations: the first binder, COALESCEd
    /// with later optional binders when several may supply it.
    Expr resolve(const std::string& var) {
        std::vector<std::string> sources;
        Expr out;
        bool typed_known = false;
        for (const auto& rel : relations_) {
            auto it = rel.vars.find(var);
            if (it == rel.vars.end()) continue;
            sources.push_back(rel.alias + "." + it->second.column);
            if (!typed_known) {
                out.type = it->second.type;
                out.typed = it->second.typed;
                typed_known = true;
            }
            if (!rel.nullable) break;  // a required binder is definitive
        }
        if (sources.empty())
            raise(ErrorKind::Syntax, "variable ?" + var + " is not bound by any pattern");
        if (sources.size() == 1) {
            out.sql = sources[0];
        } else {
            out.sql = "COALESCE(";
            for (std::size_t i = 0; i < sources.size(); ++i) {
                if (i) out.sql += ", ";
                out.sql += sources[i];
            }
            out.sql += ")";
        }
        return out;
    }

    enum class TypeClass { Numeric, Text, Boolean };

    TypeClass filter_class(const FilterExpr& e) {
        switch (e.op) {
            case FilterExpr::Op::NumberLit: return TypeClass::Numeric;
            case FilterExpr::Op::StringLit: return TypeClass::Text;
            case FilterExpr::Op::BoolLit: return TypeClass::Boolean;
            case FilterExpr::Op::Var: {
                Expr expr = resolve(e.text);
                if (numeric_class(expr)) return TypeClass::Numeric;
                return TypeClass::Text;
            }
            case FilterExpr::Op::Add:
            case FilterExpr::Op::Sub:
            case FilterExpr::Op::Mul:
            case FilterExpr::Op::Div:
            case FilterExpr::Op::Neg:
                return TypeClass::Numeric;
            default:
                return TypeClass::Boolean;
        }
    }

    std::string compile_filter(const FilterExpr& e) {
        const bool lexical = options_.comparison == ComparisonMode::Lexical;
        switch (e.op) {
            case FilterExpr::Op::Or:
                return "(" + compile_filter(e.children[0]) + " OR " +
                       compile_filter(e.children[1]) + ")";
            case FilterExpr::Op::And:
                return "(" + compile_filter(e.children[0]) + " AND " +
                       compile_filter(e.children[1]) + ")";
            case FilterExpr::Op::Not:
                return "(NOT " + compile_filter(e.children[0]) + ")";
            case FilterExpr::Op::Eq:
            case FilterExpr::Op::Ne:
            case FilterExpr::Op::Lt:
            case FilterExpr::Op::Le:
            case FilterExpr::Op::Gt:
            case FilterExpr::Op::Ge: {
                const char* op = e.op == FilterExpr::Op::Eq   ? "="
                                 : e.op == FilterExpr::Op::Ne ? "<>"
                                 : e.op == FilterExpr::Op::Lt ? "<"
                                 : e.op == FilterExpr::Op::Le ? "<="
                                 : e.op == FilterExpr::Op::Gt ? ">"
                                                              : ">=";
                std::string lhs = compile_value(e.children[0]);
                std::string rhs = compile_value(e.children[1]);
                if (lexical)
                    return "CAST(" + lhs + " AS TEXT) " + op + " CAST(" + rhs + " AS TEXT)";
                TypeClass lc = filter_class(e.children[0]);
                TypeClass rc = filter_class(e.children[1]);
                const bool ln = lc != TypeClass::Text;
                const bool rn = rc != TypeClass::Text;
                if (ln != rn)
                    raise(ErrorKind::UntypedComparison,
                          "FILTER compares a numeric operand with a non-numeric one");
                return lhs + " " + op + " " + rhs;
            }
            default: {
                // bare value used as a boolean
                return compile_value(e) + " <> 0";
            }
        }
    }

    std::string compile_value(const FilterExpr& e) {
        const bool lexical = options_.comparison == ComparisonMode::Lexical;
        switch (e.op) {
            case FilterExpr::Op::Var:
                return resolve(e.text).sql;
            case FilterExpr::Op::StringLit:
                return sql_quote(e.text);
            case FilterExpr::Op::NumberLit:
                return e.text;
            case FilterExpr::Op::BoolLit:
                return e.boolean ? "1" : "0";
            case FilterExpr::Op::Neg:
                return "(-" + compile_value(e.children[0]) + ")";
            case FilterExpr::Op::Add:
            case FilterExpr::Op::Sub:
            case FilterExpr::Op::Mul:
            case FilterExpr::Op::Div: {
                const char* op = e.op == FilterExpr::Op::Add   ? "+"
                                 : e.op == FilterExpr::Op::Sub ? "-"
                                 : e.op == FilterExpr::Op::Mul ? "*"
                                                               : "/";
                if (!lexical) {
                    for (const auto& child : e.children)
                        if (filter_class(child) == TypeClass::Text)
                            raise(ErrorKind::UntypedComparison,
                                  "arithmetic over a non-numeric operand");
                }
                return "(" + compile_value(e.children[0]) + " " + op + " " +
                       compile_value(e.children[1]) + ")";
            }
            default:
                return compile_filter(e);
        }
    }

    const Query& query_;
    const MappingDocument& mapping_;
    const DdlScript& ddl_;
    TranslateOptions options_;
    std::vector<Relation> relations_;
};

}  // namespace

SqlQuery translate_query(const Query& q, const MappingDocument& m, const DdlScript& ddl,
                         const TranslateOptions& options) {
    return Translator(q, m, ddl, options).translate();
}

ResultSet execute(const SqlQuery& sql, Db& conn) {
    ResultSet out;
    for (const auto& [var, col] : sql.projection) out.vars.push_back(var);
    Stmt stmt = conn.prepare(sql.text);
    while (stmt.step()) {
        std::vector<SqlValue> row;
        row.reserve(sql.projection.size());
        for (std::size_t i = 0; i < sql.projection.size(); ++i)
            row.push_back(stmt.column(static_cast<int>(i)));
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::vector<std::string> bag_keys(const ResultSet& rs) {
    std::vector<std::string> keys;
    keys.reserve(rs.rows.size());
    for (const auto& row : rs.rows) {
        std::string key;
        for (const auto& v : row) {
            if (is_null(v)) key += "~";
            else if (std::holds_alternative<std::string>(v)) key += "s:" + std::get<std::string>(v);
            else key += "n:" + canonical_text(v);
            key += "\x1f";
        }
        keys.push_back(std::move(key));
    }
    return keys;
}

bool bags_equal(const ResultSet& a, const ResultSet& b) {
    if (a.rows.size() != b.rows.size()) return false;
    auto ka = bag_keys(a);
    auto kb = bag_keys(b);
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

std::string result_to_csv(const ResultSet& rs) {
    std::vector<std::vector<std::string>> records;
    records.push_back(rs.vars);
    for (const auto& row : rs.rows) {
        std::vector<std::string> record;
        record.reserve(row.size());
        for (const auto& v : row) record.push_back(canonical_text(v));
        records.push_back(std::move(record));
    }
    std::string out;
    for (const auto& record : records) {
        for (std::size_t i = 0; i < record.size(); ++i) {
            if (i) out.push_back(',');
            bool needs_quote = record[i].find_first_of(",\"\n") != std::string::npos;
            if (needs_quote) {
                out.push_back('"');
                for (char c : record[i]) {
                    if (c == '"') out += "\"\"";
                    else out.push_back(c);
                }
                out.push_back('"');
            } else {
                out += record[i];
            }
        }
        out.push_back('\n');
    }
    return out;
}

std::string result_to_json(const ResultSet& rs) {
    using nlohmann::json;
    json root;
    root["head"]["vars"] = rs.vars;
    json bindings = json::array();
    for (const auto& row : rs.rows) {
        json binding = json::object();
        for (std::size_t i = 0; i < rs.vars.size(); ++i) {
            if (is_null(row[i])) continue;
            json cell;
            cell["type"] = "literal";
            cell["value"] = canonical_text(row[i]);
            binding[rs.vars[i]] = cell;
        }
        bindings.push_back(binding);
    }
    root["results"]["bindings"] = bindings;
    return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Gold-standard materialization and naive evaluation.

namespace {

/// Cell view after metadata semantics: zero or more string tokens plus the
/// declared datatype. Non-separator columns carry at most one token.
struct PreparedColumn {
    Datatype type = Datatype::String;
    bool typed = false;
};

struct PreparedSource {
    const TabularSource* source = nullptr;
    std::vector<PreparedColumn> columns;
    // tokens[row][col] — empty vector means absent
    std::vector<std::vector<std::vector<std::string>>> tokens;
};

std::vector<std::string> prepare_cell(const Cell& cell, const ColumnMetadata* md) {
    std::vector<std::string> raw;
    if (md && md->separator) {
        if (cell && !cell->empty()) {
            const std::string& value = *cell;
            std::size_t pos = 0;
            while (pos <= value.size()) {
                auto sep = value.find(*md->separator, pos);
                std::string token = value.substr(
                    pos, sep == std::string::npos ? std::string::npos : sep - pos);
                if (!token.empty()) raw.push_back(token);
                if (sep == std::string::npos) break;
                pos = sep + 1;
            }
        }
    } else if (cell) {
        raw.push_back(*cell);
    }

    std::vector<std::string> out;
    for (auto& token : raw) {
        std::optional<std::string> value = token;
        if (md) {
            for (const auto& marker : md->null_markers)
                if (*value == marker) {
                    value.reset();
                    break;
                }
        }
        if (!value && md && md->default_value) value = *md->default_value;
        if (value && md && md->format) {
            std::optional<std::string> canonical;
            if (is_temporal(md->datatype))
                canonical = reformat_temporal(*value, *md->format, md->datatype);
            else
                canonical = normalize_number(*value, *md->format);
            if (canonical) value = *canonical;
            // non-conforming values keep their text; typing below drops them
        }
        if (value) out.push_back(*value);
    }
    if (out.empty() && md && md->default_value && !(md && md->separator))
        out.push_back(*md->default_value);
    return out;
}

std::optional<SqlValue> type_token(const std::string& token, Datatype type) {
    switch (type) {
        case Datatype::Integer: {
            try {
                std::size_t used = 0;
                long long v = std::stoll(token, &used);
                if (used != token.size()) return std::nullopt;
                return SqlValue{static_cast<std::int64_t>(v)};
            } catch (...) {
                return std::nullopt;
            }
        }
        case Datatype::Decimal:
        case Datatype::Double: {
            try {
                std::size_t used = 0;
                double v = std::stod(token, &used);
                if (used != token.size()) return std::nullopt;
                return SqlValue{v};
            } catch (...) {
                return std::nullopt;
            }
        }
        case Datatype::Boolean: {
            if (token == "true" || token == "1") return SqlValue{std::int64_t{1}};
            if (token == "false" || token == "0") return SqlValue{std::int64_t{0}};
            return std::nullopt;
        }
        default:
            return SqlValue{token};
    }
}

/// Renders a token the way the relational path would after a typed load
/// (integers lose leading zeros, decimals their trailing ones).
std::string render_token(const std::string& token, Datatype type, bool typed) {
    if (!typed) return token;
    auto value = type_token(token, type);
    if (!value) return token;
    return canonical_text(*value);
}

struct OracleMapping {
    const VirtualTabularDataset* vtd = nullptr;
    std::map<std::string, PreparedSource> prepared;
};

const PreparedColumn* prepared_column(const PreparedSource& src, const std::string& name,
                                      int* index) {
    int idx = src.source->column_index(name);
    if (idx < 0) return nullptr;
    if (index) *index = idx;
    return &src.columns[static_cast<std::size_t>(idx)];
}

std::optional<std::string> render_template_row(const Template& tpl, const PreparedSource& src,
                                               std::size_t row) {
    std::string out;
    for (const auto& part : tpl.parts) {
        if (!part.is_column) {
            out += part.text;
            continue;
        }
        int idx = -1;
        const auto* col = prepared_column(src, part.text, &idx);
        if (!col) return std::nullopt;
        const auto& tokens = src.tokens[row][static_cast<std::size_t>(idx)];
        if (tokens.size() != 1) return std::nullopt;
        out += render_token(tokens[0], col->type, col->typed);
    }
    return out;
}

}  // namespace

TripleSet materialize_oracle(const VirtualTabularDataset& vtd, const FunctionRegistry& registry) {
    OracleMapping om;
    om.vtd = &vtd;

    for (const auto& src : vtd.sources) {
        PreparedSource prep;
        prep.source = &src;
        const auto* table_md = vtd.metadata.table(src.path);
        for (const auto& col : src.columns) {
            const ColumnMetadata* md = table_md ? table_md->column(col) : nullptr;
            PreparedColumn pc;
            if (md) {
                pc.type = md->datatype;
                pc.typed = true;
            }
            prep.columns.push_back(pc);
        }
        // datatype hints type columns the metadata does not cover
        for (const auto& tm : vtd.mapping.triples_maps) {
            if (tm.source_path != src.path) continue;
            for (const auto& p : tm.pom) {
                if (!p.datatype_hint) continue;
                const auto* col = std::get_if<ColumnReference>(&p.object);
                if (!col) continue;
                int idx = src.column_index(col->column);
                if (idx < 0 || prep.columns[static_cast<std::size_t>(idx)].typed) continue;
                if (auto dt = datatype_from_string(*p.datatype_hint)) {
                    prep.columns[static_cast<std::size_t>(idx)].type = *dt;
                    prep.columns[static_cast<std::size_t>(idx)].typed = true;
                }
            }
        }
        prep.tokens.reserve(src.rows.size());
        for (const auto& row : src.rows) {
            std::vector<std::vector<std::string>> cells;
            cells.reserve(row.size());
            for (std::size_t c = 0; c < row.size(); ++c) {
                const ColumnMetadata* md = table_md ? table_md->column(src.columns[c]) : nullptr;
                cells.push_back(prepare_cell(row[c], md));
            }
            prep.tokens.push_back(std::move(cells));
        }
        om.prepared[src.path] = std::move(prep);
    }

    TripleSet triples;
    std::set<std::string> seen;
    auto emit = [&triples, &seen](std::string s, const std::string& p, SqlValue o) {
        std::string key = s + "\x1f" + p + "\x1f" +
                          (std::holds_alternative<std::string>(o) ? "s:" : "n:") +
                          canonical_text(o);
        if (seen.insert(key).second) triples.push_back({std::move(s), p, std::move(o)});
    };

    for (const auto& tm : vtd.mapping.triples_maps) {
        auto prep_it = om.prepared.find(tm.source_path);
        if (prep_it == om.prepared.end()) continue;
        const PreparedSource& prep = prep_it->second;

        for (std::size_t r = 0; r < prep.tokens.size(); ++r) {
            auto subject = render_template_row(tm.subject_template, prep, r);
            if (!subject) continue;
            if (tm.class_iri) emit(*subject, kRdfType, SqlValue{*tm.class_iri});

            for (const auto& p : tm.pom) {
                if (const auto* col = std::get_if<ColumnReference>(&p.object)) {
                    int idx = -1;
                    const auto* pc = prepared_column(prep, col->column, &idx);
                    if (!pc) continue;
                    for (const auto& token : prep.tokens[r][static_cast<std::size_t>(idx)]) {
                        auto value = pc->typed ? type_token(token, pc->type) : SqlValue{token};
                        if (value) emit(*subject, p.predicate, *value);
                    }
                } else if (const auto* tpl = std::get_if<Template>(&p.object)) {
                    auto rendered = render_template_row(*tpl, prep, r);
                    if (rendered) emit(*subject, p.predicate, SqlValue{*rendered});
                } else if (const auto* fn = std::get_if<FunctionCall>(&p.object)) {
                    // evaluate against a single-token view of the row
                    Row view;
                    view.reserve(prep.tokens[r].size());
                    bool multi = false;
                    for (const auto& tokens : prep.tokens[r]) {
                        if (tokens.empty()) view.push_back(std::nullopt);
                        else if (tokens.size() == 1) view.push_back(tokens[0]);
                        else {
                            view.push_back(tokens[0]);
                            multi = true;
                        }
                    }
                    (void)multi;
                    Cell result = registry.evaluate(*fn, *prep.source, view, r + 1);
                    if (!result) continue;
                    SqlValue value{*result};
                    if (p.datatype_hint) {
                        if (auto dt = datatype_from_string(*p.datatype_hint)) {
                            auto typed = type_token(*result, *dt);
                            if (!typed) continue;
                            value = *typed;
                        }
                    }
                    emit(*subject, p.predicate, value);
                } else if (const auto* join = std::get_if<JoinRef>(&p.object)) {
                    if (!p.join) continue;
                    const TriplesMap* parent = vtd.mapping.find(join->parent_tm_id);
                    if (!parent) continue;
                    auto parent_it = om.prepared.find(parent->source_path);
                    if (parent_it == om.prepared.end()) continue;
                    const PreparedSource& pprep = parent_it->second;
                    int child_idx = -1;
                    const auto* child_col = prepared_column(prep, p.join->child_column, &child_idx);
                    int parent_idx = -1;
                    const auto* parent_col =
                        prepared_column(pprep, p.join->parent_column, &parent_idx);
                    if (!child_col || !parent_col) continue;
                    const auto& child_tokens = prep.tokens[r][static_cast<std::size_t>(child_idx)];
                    if (child_tokens.size() != 1) continue;
                    auto child_value = child_col->typed
                                           ? type_token(child_tokens[0], child_col->type)
                                           : SqlValue{child_tokens[0]};
                    if (!child_value) continue;
                    for (std::size_t pr = 0; pr < pprep.tokens.size(); ++pr) {
                        const auto& parent_tokens =
                            pprep.tokens[pr][static_cast<std::size_t>(parent_idx)];
                        if (parent_tokens.size() != 1) continue;
                        auto parent_value = parent_col->typed
                                                ? type_token(parent_tokens[0], parent_col->type)
                                                : SqlValue{parent_tokens[0]};
                        if (!parent_value || !values_equal(*child_value, *parent_value)) continue;
                        auto parent_subject =
                            render_template_row(parent->subject_template, pprep, pr);
                        if (parent_subject)
                            emit(*subject, p.predicate, SqlValue{*parent_subject});
                    }
                }
            }
        }
    }
    return triples;
}

// ---------------------------------------------------------------------------
// Naive evaluation over a triple set.

namespace {

using Binding = std::map<std::string, SqlValue>;

SqlValue literal_value(const Term& t) {
    if (literal_is_numeric(t)) {
        try {
            if (t.value.find('.') == std::string::npos)
                return SqlValue{static_cast<std::int64_t>(std::stoll(t.value))};
            return SqlValue{std::stod(t.value)};
        } catch (...) {
            return SqlValue{t.value};
        }
    }
    return SqlValue{t.value};
}

bool term_matches(const Term& term, const SqlValue& value, Binding& binding) {
    switch (term.kind) {
        case Term::Kind::Variable: {
            auto it = binding.find(term.value);
            if (it != binding.end()) return values_equal(it->second, value);
            binding[term.value] = value;
            return true;
        }
        case Term::Kind::Iri:
            return std::holds_alternative<std::string>(value) &&
                   std::get<std::string>(value) == term.value;
        case Term::Kind::Literal:
            return values_equal(literal_value(term), value);
    }
    return false;
}

std::vector<Binding> match_patterns(const std::vector<TriplePattern>& patterns,
                                    const TripleSet& triples) {
    std::vector<Binding> solutions{Binding{}};
    for (const auto& p : patterns) {
        std::vector<Binding> next;
        for (const auto& mu : solutions) {
            for (const auto& t : triples) {
                if (t.predicate != p.predicate.value) continue;
                Binding extended = mu;
                if (!term_matches(p.subject, SqlValue{t.subject}, extended)) continue;
                if (!term_matches(p.object, t.object, extended)) continue;
                next.push_back(std::move(extended));
            }
        }
        solutions = std::move(next);
    }
    return solutions;
}

enum class Tri { True, False, Err };

struct FilterValue {
    enum class Kind { Number, Text, Boolean, Error } kind = Kind::Error;
    double number = 0;
    std::string text;
    Tri boolean = Tri::Err;
};

FilterValue eval_filter(const FilterExpr& e, const Binding& mu);

Tri eval_bool(const FilterExpr& e, const Binding& mu) {
    FilterValue v = eval_filter(e, mu);
    if (v.kind == FilterValue::Kind::Boolean) return v.boolean;
    if (v.kind == FilterValue::Kind::Number) return v.number != 0 ? Tri::True : Tri::False;
    return Tri::Err;
}

FilterValue eval_filter(const FilterExpr& e, const Binding& mu) {
    FilterValue out;
    auto boolean = [](Tri t) {
        FilterValue v;
        v.kind = FilterValue::Kind::Boolean;
        v.boolean = t;
        return v;
    };
    switch (e.op) {
        case FilterExpr::Op::Var: {
            auto it = mu.find(e.text);
            if (it == mu.end() || is_null(it->second)) return out;  // error: unbound
            if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
                out.kind = FilterValue::Kind::Number;
                out.number = static_cast<double>(*i);
            } else if (const auto* d = std::get_if<double>(&it->second)) {
                out.kind = FilterValue::Kind::Number;
                out.number = *d;
            } else {
                out.kind = FilterValue::Kind::Text;
                out.text = std::get<std::string>(it->second);
            }
            return out;
        }
        case FilterExpr::Op::NumberLit:
            out.kind = FilterValue::Kind::Number;
            out.number = e.number;
            return out;
        case FilterExpr::Op::StringLit:
            out.kind = FilterValue::Kind::Text;
            out.text = e.text;
            return out;
        case FilterExpr::Op::BoolLit:
            return boolean(e.boolean ? Tri::True : Tri::False);
        case FilterExpr::Op::Neg: {
            FilterValue v = eval_filter(e.children[0], mu);
            if (v.kind != FilterValue::Kind::Number) return out;
            v.number = -v.number;
            return v;
        }
        case FilterExpr::Op::Add:
        case FilterExpr::Op::Sub:
        case FilterExpr::Op::Mul:
        case FilterExpr::Op::Div: {
            FilterValue l = eval_filter(e.children[0], mu);
            FilterValue r = eval_filter(e.children[1], mu);
            if (l.kind != FilterValue::Kind::Number || r.kind != FilterValue::Kind::Number)
                return out;
            out.kind = FilterValue::Kind::Number;
            switch (e.op) {
                case FilterExpr::Op::Add: out.number = l.number + r.number; break;
                case FilterExpr::Op::Sub: out.number = l.number - r.number; break;
                case FilterExpr::Op::Mul: out.number = l.number * r.number; break;
                default:
                    if (r.number == 0) return FilterValue{};
                    out.number = l.number / r.number;
            }
            return out;
        }
        case FilterExpr::Op::Eq:
        case FilterExpr::Op::Ne:
        case FilterExpr::Op::Lt:
        case FilterExpr::Op::Le:
        case FilterExpr::Op::Gt:
        case FilterExpr::Op::Ge: {
            FilterValue l = eval_filter(e.children[0], mu);
            FilterValue r = eval_filter(e.children[1], mu);
            if (l.kind == FilterValue::Kind::Error || r.kind == FilterValue::Kind::Error)
                return boolean(Tri::Err);
            if (l.kind == FilterValue::Kind::Boolean || r.kind == FilterValue::Kind::Boolean) {
                auto to_num = [](const FilterValue& v) {
                    return v.kind == FilterValue::Kind::Boolean ? (v.boolean == Tri::True ? 1.0 : 0.0)
                                                                : v.number;
                };
                if ((l.kind == FilterValue::Kind::Text) || (r.kind == FilterValue::Kind::Text))
                    return boolean(Tri::Err);
                l.kind = FilterValue::Kind::Number;
                l.number = to_num(l);
                r.kind = FilterValue::Kind::Number;
                r.number = to_num(r);
            }
            if (l.kind != r.kind) return boolean(Tri::Err);
            int cmp;
            if (l.kind == FilterValue::Kind::Number)
                cmp = l.number < r.number ? -1 : (l.number > r.number ? 1 : 0);
            else
                cmp = l.text.compare(r.text) < 0 ? -1 : (l.text.compare(r.text) > 0 ? 1 : 0);
            bool result;
            switch (e.op) {
                case FilterExpr::Op::Eq: result = cmp == 0; break;
                case FilterExpr::Op::Ne: result = cmp != 0; break;
                case FilterExpr::Op::Lt: result = cmp < 0; break;
                case FilterExpr::Op::Le: result = cmp <= 0; break;
                case FilterExpr::Op::Gt: result = cmp > 0; break;
                default: result = cmp >= 0;
            }
            return boolean(result ? Tri::True : Tri::False);
        }
        case FilterExpr::Op::And: {
            Tri l = eval_bool(e.children[0], mu);
            Tri r = eval_bool(e.children[1], mu);
            if (l == Tri::False || r == Tri::False) return boolean(Tri::False);
            if (l == Tri::True && r == Tri::True) return boolean(Tri::True);
            return boolean(Tri::Err);
        }
        case FilterExpr::Op::Or: {
            Tri l = eval_bool(e.children[0], mu);
            Tri r = eval_bool(e.children[1], mu);
            if (l == Tri::True || r == Tri::True) return boolean(Tri::True);
            if (l == Tri::False && r == Tri::False) return boolean(Tri::False);
            return boolean(Tri::Err);
        }
        case FilterExpr::Op::Not: {
            Tri v = eval_bool(e.children[0], mu);
            if (v == Tri::True) return boolean(Tri::False);
            if (v == Tri::False) return boolean(Tri::True);
            return boolean(Tri::Err);
        }
    }
    return out;
}

bool compatible(const Binding& mu, const Binding& nu) {
    for (const auto& [var, value] : nu) {
        auto it = mu.find(var);
        if (it == mu.end() || is_null(it->second)) continue;
        if (!values_equal(it->second, value)) return false;
    }
    return true;
}

}  // namespace

ResultSet eval_oracle(const Query& q, const TripleSet& triples) {
    std::vector<Binding> solutions = match_patterns(q.bgp, triples);

    for (const auto& clause : q.optionals) {
        std::vector<Binding> clause_solutions = match_patterns(clause, triples);
        std::vector<Binding> next;
        for (const auto& mu : solutions) {
            bool extended = false;
            for (const auto& nu : clause_solutions) {
                if (!compatible(mu, nu)) continue;
                Binding merged = mu;
                for (const auto& [var, value] : nu) {
                    auto it = merged.find(var);
                    if (it == merged.end() || is_null(it->second)) merged[var] = value;
                }
                next.push_back(std::move(merged));
                extended = true;
            }
            if (!extended) next.push_back(mu);
        }
        solutions = std::move(next);
    }

    for (const auto& f : q.filters) {
        std::vector<Binding> kept;
        for (const auto& mu : solutions)
            if (eval_bool(f, mu) == Tri::True) kept.push_back(mu);
        solutions = std::move(kept);
    }

    ResultSet out;
    out.vars = q.projection();
    for (const auto& mu : solutions) {
        std::vector<SqlValue> row;
        row.reserve(out.vars.size());
        for (const auto& v : out.vars) {
            auto it = mu.find(v);
            row.push_back(it == mu.end() ? SqlValue{std::monostate{}} : it->second);
        }
        out.rows.push_back(std::move(row));
    }

    if (!q.order_by.empty()) {
        std::map<std::string, std::size_t> var_index;
        for (std::size_t i = 0; i < out.vars.size(); ++i) var_index[out.vars[i]] = i;
        std::stable_sort(out.rows.begin(), out.rows.end(),
                         [&](const std::vector<SqlValue>& a, const std::vector<SqlValue>& b) {
                             for (const auto& key : q.order_by) {
                                 auto it = var_index.find(key.variable);
                                 if (it == var_index.end()) continue;
                                 const SqlValue& va = a[it->second];
                                 const SqlValue& vb = b[it->second];
                                 if (value_less(va, vb)) return key.ascending;
                                 if (value_less(vb, va)) return !key.ascending;
                             }
                             return false;
                         });
    }

    if (q.distinct) {
        std::set<std::string> seen;
        std::vector<std::vector<SqlValue>> unique;
        auto keys = bag_keys(out);
        for (std::size_t i = 0; i < out.rows.size(); ++i)
            if (seen.insert(keys[i]).second) unique.push_back(out.rows[i]);
        out.rows = std::move(unique);
    }

    long offset = q.offset.value_or(0);
    if (offset > 0) {
        if (static_cast<std::size_t>(offset) >= out.rows.size()) out.rows.clear();
        else out.rows.erase(out.rows.begin(), out.rows.begin() + offset);
    }
    if (q.limit && static_cast<std::size_t>(*q.limit) < out.rows.size())
        out.rows.resize(static_cast<std::size_t>(*q.limit));

    return out;
}

// ---------------------------------------------------------------------------
// Engine adapters.

namespace {

class ReferenceAdapter : public EngineAdapter {
public:
    bool accepts(const RelationalArtifacts&) const override { return true; }

    ResultSet translate_and_run(const Query& q, const RelationalArtifacts& artifacts,
                                Db& conn) override {
        SqlQuery sql = translate_query(q, artifacts.translated_mapping, artifacts.ddl);
        return execute(sql, conn);
    }
};

}  // namespace

std::shared_ptr<EngineAdapter> make_reference_adapter() {
    return std::make_shared<ReferenceAdapter>();
}

EngineRegistry& EngineRegistry::instance() {
    static EngineRegistry registry = [] {
        EngineRegistry r;
        r.register_engine("reference", make_reference_adapter());
        return r;
    }();
    return registry;
}

void EngineRegistry::register_engine(const std::string& name,
                                     std::shared_ptr<EngineAdapter> adapter) {
    adapters_[name] = std::move(adapter);
}

bool EngineRegistry::contains(const std::string& name) const { return adapters_.count(name) > 0; }

ResultSet EngineRegistry::run_external(const std::string& name, const Query& q,
                                       const RelationalArtifacts& artifacts, Db& conn) {
    auto it = adapters_.find(name);
    if (it == adapters_.end())
        raise(ErrorKind::Adapter, "unregistered engine '" + name + "'");
    try {
        if (!it->second->accepts(artifacts))
            raise(ErrorKind::Adapter, "engine '" + name + "' rejects the artifacts");
        return it->second->translate_and_run(q, artifacts, conn);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Adapter) throw;
        throw Error(ErrorKind::Adapter, "engine '" + name + "' failed: " + e.what());
    }
}

}  // namespace obda
