// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tabular_obda/core_model.hpp"

namespace obda::sparql {

struct Term {
    enum class Kind { Variable, Iri, Literal };
    Kind kind = Kind::Variable;
    std::string value;  // variable name (no '?'), IRI, or literal lexical form
    std::optional<std::string> datatype;  // literal datatype IRI when written
    bool numeric = false;                 // literal written as a bare number

    bool operator==(const Term&) const = default;
    bool operator<(const Term& o) const {
        if (kind != o.kind) return kind < o.kind;
        return value < o.value;
    }
};

struct TriplePattern {
    Term subject;
    Term predicate;  // always a constant IRI
    Term object;
    bool optional = false;  // true when the pattern came from an OPTIONAL clause

    bool operator==(const TriplePattern&) const = default;
};

/// FILTER expression tree. Leaves are variables and literals; inner nodes
/// are the comparison, arithmetic and logical operators of the subset.
struct FilterExpr {
    enum class Op {
        Or, And, Not,
        Eq, Ne, Lt, Le, Gt, Ge,
        Add, Sub, Mul, Div, Neg,
        Var, StringLit, NumberLit, BoolLit
    };
    Op op = Op::Var;
    std::vector<FilterExpr> children;
    std::string text;   // variable name or string literal
    double number = 0;  // NumberLit payload
    bool boolean = false;

    std::set<std::string> variables() const;
};

struct OrderKey {
    std::string variable;
    bool ascending = true;
};

struct Query {
    bool select_all = false;
    bool distinct = false;
    std::vector<std::string> projected_vars;  // empty with select_all
    std::vector<TriplePattern> bgp;
    std::vector<std::vector<TriplePattern>> optionals;
    std::vector<FilterExpr> filters;
    std::optional<long> limit;
    std::optional<long> offset;
    std::vector<OrderKey> order_by;

    /// All variables in first-appearance order (bgp, then optionals);
    /// this is the projection when select_all is set.
    std::vector<std::string> variables_in_order() const;
    std::vector<std::string> projection() const;
};

/// One star-shaped group: the patterns sharing a subject term.
struct Ssg {
    Term subject;
    std::vector<TriplePattern> patterns;       // required first, then optional
    std::set<std::string> predicates;          // all predicates of the group
    std::set<std::string> required_predicates; // predicates of non-optional patterns
    /// Object of a non-optional rdf:type pattern with a constant object,
    /// when present; drives class-aware triples-map matching.
    std::optional<std::string> required_class;
};

struct SsgSet {
    std::vector<Ssg> groups;

    const Ssg* group_for(const Term& subject) const;
};

/// Parses the supported SPARQL subset: SELECT [DISTINCT], BGP,
/// non-nested OPTIONAL, FILTER with comparison/arithmetic/logical
/// operators, LIMIT/OFFSET/ORDER BY and PREFIX declarations.
/// Anything else raises UnsupportedFeature naming the construct.
Query parse_query(const std::string& text);

/// Partitions the query's patterns into star-shaped groups, one per
/// distinct subject term, in order of first appearance.
SsgSet build_ssgs(const Query& q);

}  // namespace obda::sparql
