// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tabular_obda/core_model.hpp"

namespace obda {

/// Named transformation functions usable from mapping rules. Functions
/// operate on cell values; an absent input makes the whole call absent
/// unless the function states otherwise (none of the builtins do).
class FunctionRegistry {
public:
    using Fn = std::function<Cell(const std::vector<Cell>&)>;

    /// Registry preloaded with the builtin set: concat, uppercase,
    /// lowercase, trim, replace, slugify, date_reformat, numeric_parse
    /// and lookup_table.
    static const FunctionRegistry& builtin();

    FunctionRegistry();

    void register_function(const std::string& name, Fn fn);
    void register_lookup_table(const std::string& name,
                               std::map<std::string, std::string> table);

    bool contains(const std::string& name) const;

    /// Evaluates a call tree against one row. Column arguments are
    /// resolved through `source`; throws FunctionError on arity or
    /// domain problems, with the row number in the message.
    Cell evaluate(const FunctionCall& call, const TabularSource& source,
                  const Row& row, std::size_t row_number) const;

private:
    std::map<std::string, Fn> functions_;
    std::map<std::string, std::map<std::string, std::string>> lookup_tables_;
};

/// Reparses `value` according to a date/time pattern (tokens yyyy, MM,
/// dd, HH, mm, ss) and renders it in ISO-8601 extended form. Returns
/// nullopt when the value does not match the pattern.
std::optional<std::string> reformat_temporal(const std::string& value,
                                             const std::string& pattern,
                                             Datatype target);

/// Normalizes a formatted number (e.g. "1.234,50" under pattern
/// "#.##0,00") to canonical form: '.' radix point, no grouping.
std::optional<std::string> normalize_number(const std::string& value,
                                            const std::string& pattern);

}  // namespace obda
