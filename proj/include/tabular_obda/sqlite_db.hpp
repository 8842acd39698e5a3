// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

struct sqlite3;
struct sqlite3_stmt;

namespace obda {

/// A relational value: SQL NULL (monostate), integer, real or text.
using SqlValue = std::variant<std::monostate, std::int64_t, double, std::string>;

bool is_null(const SqlValue& v);

/// Canonical text rendering used for result files and multiset keys:
/// integers in decimal, reals trimmed ("2" not "2.0"), NULL empty.
std::string canonical_text(const SqlValue& v);

/// Typed equality matching the engine's comparison semantics: integers
/// and reals compare numerically, text compares byte-wise, NULL equals
/// nothing.
bool values_equal(const SqlValue& a, const SqlValue& b);

/// Ordering matching the engine's ORDER BY: NULL first, then numerics by
/// value, then text by bytes.
bool value_less(const SqlValue& a, const SqlValue& b);

class Stmt;

/// Embedded relational connection. Accepts a bare file path, ":memory:",
/// or a "sqlite:<path>" URL.
class Db {
public:
    explicit Db(const std::string& url);
    ~Db();
    Db(const Db&) = delete;
    Db& operator=(const Db&) = delete;

    void execute(const std::string& sql);
    Stmt prepare(const std::string& sql);

    static std::string path_from_url(const std::string& url);

private:
    friend class Stmt;
    sqlite3* handle_ = nullptr;
};

class Stmt {
public:
    Stmt(Db& db, const std::string& sql);
    ~Stmt();
    Stmt(Stmt&& other) noexcept;
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    void bind(int index, const SqlValue& value);  // 1-based

    /// Advances to the next row; false when done. Constraint failures
    /// surface as ConstraintViolation, other engine failures as
    /// EngineError.
    bool step();

    void reset();

    int column_count() const;
    SqlValue column(int index) const;  // 0-based

private:
    sqlite3_stmt* stmt_ = nullptr;
    std::string sql_;
    Db* db_ = nullptr;
};

}  // namespace obda
