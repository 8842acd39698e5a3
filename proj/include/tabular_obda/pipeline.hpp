// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tabular_obda/constraints.hpp"
#include "tabular_obda/core_model.hpp"
#include "tabular_obda/functions.hpp"
#include "tabular_obda/sparql.hpp"

namespace obda {

struct SelectionPlan {
    std::set<std::string> kept_tm_ids;
    std::map<std::string, std::set<std::string>> kept_pom_per_tm;   // tm id -> kept predicates
    std::map<std::string, std::set<std::string>> kept_columns_per_source;
    std::set<std::string> discarded_sources;
};

struct Selection {
    MappingDocument mapping;
    MetadataDocument metadata;
    SelectionPlan plan;
};

/// Triples maps whose predicate set contains the group's required
/// predicates, class-compatible when the group asks for a type. A group
/// with only optional patterns matches on its full predicate set.
std::vector<const TriplesMap*> matching_maps(const sparql::Ssg& ssg, const MappingDocument& m);

/// Query-driven pruning of mapping and metadata: keeps the maps matched
/// by each star-shaped group (all of them, union semantics), prunes each
/// kept map's predicate-object rules to the group's predicates plus any
/// join that connects two kept maps, and filters the metadata down to
/// kept sources and columns. Parents of kept join references are kept as
/// join targets.
Selection select_annotations(const sparql::Query& q, const MappingDocument& m,
                             const MetadataDocument& md);

/// Projects the dataset onto the plan: referenced sources only, each
/// narrowed to its kept columns in original column order.
std::vector<TabularSource> select_sources(const MappingDocument& m,
                                          const std::vector<TabularSource>& sources,
                                          const SelectionPlan& plan);

enum class RangePolicy { Error, Warn };

struct PipelineOptions {
    RangePolicy range_policy = RangePolicy::Error;
    unsigned jobs = 1;
    std::vector<Diagnostic>* warnings = nullptr;
};

/// Multi-valued column to child table: one row per separated token, the
/// original column replaced by a surrogate row ordinal, and the mapping
/// extended with a triples map for the child plus a join condition.
void split(VirtualTabularDataset& vtd, ConstraintSet& constraints, const Constraint& c);

/// Multi-entity source to per-entity tables, each holding one map's
/// referenced columns plus the link columns; map sources are rewritten.
void cut(VirtualTabularDataset& vtd, ConstraintSet& constraints, const Constraint& c);

/// Full-row deduplication, first occurrence kept.
TabularSource duplicates(const TabularSource& s);

/// Per-cell normalization: null markers to absent, absent to default,
/// declared formats to canonical ISO dates / plain decimals. Canonical
/// values are fixed points.
TabularSource sub(const TabularSource& s, const Constraint& substitution,
                  RangePolicy policy = RangePolicy::Error,
                  std::vector<Diagnostic>* warnings = nullptr);

/// Evaluates a mapping transformation function into a fresh `_fn_<k>`
/// column and repoints the originating rule at it. Returns the new
/// column's name.
std::string create(VirtualTabularDataset& vtd, ConstraintSet& constraints, const Constraint& c,
                   const FunctionRegistry& registry = FunctionRegistry::builtin());

/// Normalization phase: every split (2NF), then every cut (3NF). Both
/// rewrite the shared mapping and run serialized.
void normalize_phase(VirtualTabularDataset& vtd, ConstraintSet& constraints);

/// Preparation phase: per-source duplicates and sub (parallel across
/// sources), then create, which rewrites the mapping and runs serialized.
void prepare_phase(VirtualTabularDataset& vtd, ConstraintSet& constraints,
                   const PipelineOptions& options = {},
                   const FunctionRegistry& registry = FunctionRegistry::builtin());

/// Runs the normalization and preparation phases in pipeline order:
/// split, cut, then per-source duplicates, sub, create.
void apply_pipeline(VirtualTabularDataset& vtd, ConstraintSet& constraints,
                    const PipelineOptions& options = {},
                    const FunctionRegistry& registry = FunctionRegistry::builtin());

/// `RouteType` -> `route_type`: the naming rule for entity tables carved
/// out by cut.
std::string snake_case_label(const std::string& label);

}  // namespace obda
