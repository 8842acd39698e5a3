// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/functions.hpp"

#include <algorithm>
#include <cctype>

namespace obda {

namespace {

std::string require(const std::vector<Cell>& args, std::size_t i, const char* fn) {
    if (i >= args.size() || !args[i])
        raise(ErrorKind::FunctionError, std::string(fn) + ": missing argument " + std::to_string(i));
    return *args[i];
}

bool all_present(const std::vector<Cell>& args) {
    return std::all_of(args.begin(), args.end(), [](const Cell& c) { return c.has_value(); });
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string to_upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string trim_copy(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

FunctionRegistry::FunctionRegistry() {
    register_function("concat", [](const std::vector<Cell>& args) -> Cell {
        if (!all_present(args)) return std::nullopt;
        std::string out;
        for (const auto& a : args) out += *a;
        return out;
    });
    register_function("uppercase", [](const std::vector<Cell>& args) -> Cell {
        if (!all_present(args) || args.empty()) return std::nullopt;
        return to_upper(require(args, 0, "uppercase"));
    });
    register_function("lowercase", [](const std::vector<Cell>& args) -> Cell {
        if (!all_present(args) || args.empty()) return std::nullopt;
        return to_lower(require(args, 0, "lowercase"));
    });
    register_function("trim", [](const std::vector<Cell>& args) -> Cell {
        if (!all_present(args) || args.empty()) return std::nullopt;
        return trim_copy(require(args, 0, "trim"));
    });
    register_function("replace", [](const std::vector<Cell>& args) -> Cell {
        if (!all_present(args)) return std::nullopt;
        std::string s = require(args, 0, "replace");
        std::string from = require(args, 1, "replace");
        std::string to = require(args, 2, "replace");
        if (from.empty()) return s;
        std::string out;
        std::size_t pos = 0;
        while (true) {
            auto hit = s.find(from, pos);
            if (hit == std::string::npos) break;
            out.append(s, pos, hit - pos);
            out += to;
            pos = hit + from.size();
        }
        out.append(s, pos, std::string::npos);
        return out;
    });
    // Lowercase and join words with underscores; collapses runs of
    // whitespace/underscores so "Colonia Jardin" and "Colonia_jardin"
    // normalize to the same key.
    register_function("slugify", [](const std::vector<Cell>& args) -> Cell {
        if (!all_present(args) || args.empty()) return std::nullopt;
        std::string in = trim_copy(require(args, 0, "slugify"));
        std::string out;
        bool pending_sep = false;
        for (unsigned char c : in) {
            if (c == ' ' || c == '\t' || c == '_' || c == '-') {
                pending_sep = !out.empty();
            } else {
                if (pending_sep) out.push_back('_');
                pending_sep = false;
                out.push_back(static_cast<char>(std::tolower(c)));
            }
        }
        return out;
    });
    register_function("date_reformat", [](const std::vector<Cell>& args) -> Cell {
        if (!all_present(args)) return std::nullopt;
        std::string value = require(args, 0, "date_reformat");
        std::string pattern = require(args, 1, "date_reformat");
        auto iso = reformat_temporal(value, pattern, Datatype::Date);
        if (!iso) raise(ErrorKind::FunctionError,
                        "date_reformat: '" + value + "' does not match pattern '" + pattern + "'");
        return *iso;
    });
    register_function("numeric_parse", [](const std::vector<Cell>& args) -> Cell {
        if (!all_present(args)) return std::nullopt;
        std::string value = require(args, 0, "numeric_parse");
        std::string pattern = args.size() > 1 && args[1] ? *args[1] : "#,##0.##";
        auto normalized = normalize_number(value, pattern);
        if (!normalized)
            raise(ErrorKind::FunctionError,
                  "numeric_parse: '" + value + "' does not match pattern '" + pattern + "'");
        return *normalized;
    });

    // GTFS route_type codes to vehicle labels.
    register_lookup_table("gtfs_route_type", {{"0", "Tram"},
                                              {"1", "Subway"},
                                              {"2", "Rail"},
                                              {"3", "Bus"},
                                              {"4", "Ferry"},
                                              {"5", "CableCar"},
                                              {"6", "Gondola"},
                                              {"7", "Funicular"}});
}

const FunctionRegistry& FunctionRegistry::builtin() {
    static const FunctionRegistry instance;
    return instance;
}

void FunctionRegistry::register_function(const std::string& name, Fn fn) {
    functions_[name] = std::move(fn);
}

void FunctionRegistry::register_lookup_table(const std::string& name,
                                             std::map<std::string, std::string> table) {
    lookup_tables_[name] = std::move(table);
}

bool FunctionRegistry::contains(const std::string& name) const {
    return functions_.count(name) > 0 || name == "lookup_table";
}

Cell FunctionRegistry::evaluate(const FunctionCall& call, const TabularSource& source,
                                const Row& row, std::size_t row_number) const {
    std::vector<Cell> values;
    values.reserve(call.args.size());
    for (const auto& arg : call.args) {
        switch (arg.kind) {
            case FunctionArg::Kind::Constant:
                values.push_back(arg.text);
                break;
            case FunctionArg::Kind::Column: {
                int idx = source.column_index(arg.text);
                if (idx < 0)
                    raise(ErrorKind::FunctionError,
                          call.name + ": unknown column '" + arg.text + "' at row " +
                              std::to_string(row_number));
                values.push_back(row[static_cast<std::size_t>(idx)]);
                break;
            }
            case FunctionArg::Kind::Call:
                values.push_back(evaluate(*arg.call, source, row, row_number));
                break;
        }
    }

    if (call.name == "lookup_table") {
        if (values.size() != 2 || !values[0])
            raise(ErrorKind::FunctionError,
                  "lookup_table expects (table, key) at row " + std::to_string(row_number));
        auto it = lookup_tables_.find(*values[0]);
        if (it == lookup_tables_.end())
            raise(ErrorKind::FunctionError, "lookup_table: no table '" + *values[0] + "'");
        if (!values[1]) return std::nullopt;
        auto hit = it->second.find(*values[1]);
        if (hit == it->second.end()) return std::nullopt;
        return hit->second;
    }

    auto it = functions_.find(call.name);
    if (it == functions_.end())
        raise(ErrorKind::UnknownFunction, "function '" + call.name + "' is not registered");
    try {
        return it->second(values);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(ErrorKind::FunctionError,
              call.name + " failed at row " + std::to_string(row_number) + ": " + e.what());
    }
}

namespace {

struct PatternField {
    char token;   // y, M, d, H, m, s
    int length;
};

// Splits "dd/MM/yyyy" into fields and literals; literals must match verbatim.
bool parse_by_pattern(const std::string& value, const std::string& pattern,
                      std::map<char, int>& fields) {
    std::size_t vi = 0;
    std::size_t pi = 0;
    while (pi < pattern.size()) {
        char pc = pattern[pi];
        if (pc == 'y' || pc == 'M' || pc == 'd' || pc == 'H' || pc == 'm' || pc == 's') {
            int len = 0;
            while (pi < pattern.size() && pattern[pi] == pc) {
                ++len;
                ++pi;
            }
            int number = 0;
            int digits = 0;
            while (vi < value.size() && digits < len && std::isdigit(static_cast<unsigned char>(value[vi]))) {
                number = number * 10 + (value[vi] - '0');
                ++vi;
                ++digits;
            }
            if (digits == 0) return false;
            fields[pc] = number;
        } else {
            if (vi >= value.size() || value[vi] != pc) return false;
            ++vi;
            ++pi;
        }
    }
    return vi == value.size();
}

std::string pad(int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

}  // namespace

std::optional<std::string> reformat_temporal(const std::string& value,
                                             const std::string& pattern,
                                             Datatype target) {
    std::map<char, int> f;
    if (!parse_by_pattern(value, pattern, f)) return std::nullopt;
    bool has_date = f.count('y') || f.count('M') || f.count('d');
    bool has_time = f.count('H') || f.count('m') || f.count('s');
    if (target == Datatype::Date) has_time = false;
    if (target == Datatype::Time) has_date = false;

    if (has_date) {
        if (!f.count('y') || !f.count('M') || !f.count('d')) return std::nullopt;
        if (f['M'] < 1 || f['M'] > 12 || f['d'] < 1 || f['d'] > 31) return std::nullopt;
    }
    if (has_time && f['H'] > 23) return std::nullopt;

    std::string date = has_date ? pad(f['y'], 4) + "-" + pad(f['M'], 2) + "-" + pad(f['d'], 2) : "";
    std::string time = has_time ? pad(f.count('H') ? f['H'] : 0, 2) + ":" +
                                      pad(f.count('m') ? f['m'] : 0, 2) + ":" +
                                      pad(f.count('s') ? f['s'] : 0, 2)
                                : "";
    if (has_date && has_time) return date + "T" + time;
    if (has_date) return date;
    if (has_time) return time;
    return std::nullopt;
}

std::optional<std::string> normalize_number(const std::string& value,
                                            const std::string& pattern) {
    // Infer grouping and radix characters from the pattern: the separator
    // closest to the end is the radix point, any other is grouping.
    char radix = '.';
    char grouping = ',';
    auto last_dot = pattern.rfind('.');
    auto last_comma = pattern.rfind(',');
    if (last_dot != std::string::npos && last_comma != std::string::npos) {
        radix = last_dot > last_comma ? '.' : ',';
        grouping = last_dot > last_comma ? ',' : '.';
    } else if (last_comma != std::string::npos && last_dot == std::string::npos) {
        radix = ',';
        grouping = '.';
    }

    std::string out;
    bool seen_radix = false;
    bool seen_digit = false;
    for (std::size_t i = 0; i < value.size(); ++i) {
        char c = value[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            out.push_back(c);
            seen_digit = true;
        } else if (c == grouping && !seen_radix) {
            continue;
        } else if (c == radix && !seen_radix) {
            out.push_back('.');
            seen_radix = true;
        } else if ((c == '-' || c == '+') && i == 0) {
            out.push_back(c);
        } else {
            return std::nullopt;
        }
    }
    if (!seen_digit) return std::nullopt;
    return out;
}

}  // namespace obda
