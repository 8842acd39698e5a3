// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tabular_obda/functions.hpp"
#include "tabular_obda/schema.hpp"
#include "tabular_obda/sparql.hpp"
#include "tabular_obda/sqlite_db.hpp"

namespace obda {

struct ResultSet {
    std::vector<std::string> vars;
    std::vector<std::vector<SqlValue>> rows;  // aligned with vars; NULL = unbound

    std::size_t size() const { return rows.size(); }
};

/// Multiset comparison key for one row (canonical value texts joined with
/// a separator); two result sets are bag-equal when their key multisets
/// match.
std::vector<std::string> bag_keys(const ResultSet& rs);
bool bags_equal(const ResultSet& a, const ResultSet& b);

std::string result_to_csv(const ResultSet& rs);
std::string result_to_json(const ResultSet& rs);

struct SqlQuery {
    std::string text;
    std::vector<std::pair<std::string, std::string>> projection;  // var -> output column
};

/// Typed comparisons honor declared column types and reject mixed
/// numeric/string operands; lexical comparisons cast both sides to text,
/// reproducing the behavior of a constraint-free VARCHAR load.
enum class ComparisonMode { Typed, Lexical };

struct TranslateOptions {
    ComparisonMode comparison = ComparisonMode::Typed;
};

/// Reference SPARQL-to-SQL translation over a table-aligned mapping.
/// Star-shaped groups become scans (UNION ALL when several maps match),
/// shared variables become join predicates (column equality when subject
/// templates coincide textually), OPTIONAL becomes LEFT JOIN and FILTER
/// compiles to WHERE.
SqlQuery translate_query(const sparql::Query& q, const MappingDocument& m, const DdlScript& ddl,
                         const TranslateOptions& options = {});

ResultSet execute(const SqlQuery& sql, Db& conn);

/// One RDF triple with a typed object; the gold-standard materialization
/// is a set of these.
struct Triple {
    std::string subject;
    std::string predicate;
    SqlValue object;
};

using TripleSet = std::vector<Triple>;

/// Gold-standard materialization: evaluates every triples map over every
/// row, applying null markers, defaults, formats, separators and mapping
/// functions cell-wise, with join references resolved by nested loops.
/// Entirely independent of the relational path.
TripleSet materialize_oracle(const VirtualTabularDataset& vtd,
                             const FunctionRegistry& registry = FunctionRegistry::builtin());

/// Naive BGP join + OPTIONAL (left outer) + FILTER evaluation over a
/// triple set; bag semantics unless DISTINCT.
ResultSet eval_oracle(const sparql::Query& q, const TripleSet& triples);

/// Contract for delegating evaluation to an external SPARQL-to-SQL
/// engine.
class EngineAdapter {
public:
    virtual ~EngineAdapter() = default;
    virtual bool accepts(const RelationalArtifacts& artifacts) const = 0;
    virtual ResultSet translate_and_run(const sparql::Query& q,
                                        const RelationalArtifacts& artifacts, Db& conn) = 0;
};

class EngineRegistry {
public:
    static EngineRegistry& instance();

    void register_engine(const std::string& name, std::shared_ptr<EngineAdapter> adapter);
    bool contains(const std::string& name) const;

    /// Runs a registered engine; adapter failures surface as
    /// AdapterError, unknown names as AdapterError("unregistered ...").
    ResultSet run_external(const std::string& name, const sparql::Query& q,
                           const RelationalArtifacts& artifacts, Db& conn);

private:
    std::map<std::string, std::shared_ptr<EngineAdapter>> adapters_;
};

/// The builtin adapter: translate_query + execute with typed comparisons.
std::shared_ptr<EngineAdapter> make_reference_adapter();

}  // namespace obda
