// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/sqlite_db.hpp"

#include <sqlite3.h>

#include <cmath>
#include <cstdio>

#include "tabular_obda/diagnostics.hpp"

namespace obda {

bool is_null(const SqlValue& v) { return std::holds_alternative<std::monostate>(v); }

std::string canonical_text(const SqlValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        if (std::isfinite(*d) && *d == std::floor(*d) && std::fabs(*d) < 1e15)
            return std::to_string(static_cast<std::int64_t>(*d));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.15g", *d);
        return buf;
    }
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    return "";
}

bool values_equal(const SqlValue& a, const SqlValue& b) {
    if (is_null(a) || is_null(b)) return false;
    const auto* ai = std::get_if<std::int64_t>(&a);
    const auto* ad = std::get_if<double>(&a);
    const auto* bi = std::get_if<std::int64_t>(&b);
    const auto* bd = std::get_if<double>(&b);
    const bool a_num = ai || ad;
    const bool b_num = bi || bd;
    if (a_num != b_num) return false;
    if (a_num) {
        double x = ai ? static_cast<double>(*ai) : *ad;
        double y = bi ? static_cast<double>(*bi) : *bd;
        return x == y;
    }
    return std::get<std::string>(a) == std::get<std::string>(b);
}

bool value_less(const SqlValue& a, const SqlValue& b) {
    auto rank = [](const SqlValue& v) {
        if (is_null(v)) return 0;
        if (std::holds_alternative<std::string>(v)) return 2;
        return 1;
    };
    int ra = rank(a);
    int rb = rank(b);
    if (ra != rb) return ra < rb;
    if (ra == 1) {
        const auto* ai = std::get_if<std::int64_t>(&a);
        const auto* bi = std::get_if<std::int64_t>(&b);
        double x = ai ? static_cast<double>(*ai) : std::get<double>(a);
        double y = bi ? static_cast<double>(*bi) : std::get<double>(b);
        return x < y;
    }
    if (ra == 2) return std::get<std::string>(a) < std::get<std::string>(b);
    return false;
}

std::string Db::path_from_url(const std::string& url) {
    if (url.rfind("sqlite:", 0) == 0) return url.substr(7);
    return url;
}

Db::Db(const std::string& url) {
    const std::string path = path_from_url(url);
    if (sqlite3_open(path.c_str(), &handle_) != SQLITE_OK) {
        std::string msg = handle_ ? sqlite3_errmsg(handle_) : "out of memory";
        if (handle_) sqlite3_close(handle_);
        raise(ErrorKind::Engine, "cannot open database '" + path + "': " + msg);
    }
    execute("PRAGMA foreign_keys = ON");
}

Db::~Db() {
    if (handle_) sqlite3_close(handle_);
}

void Db::execute(const std::string& sql) {
    char* errmsg = nullptr;
    if (sqlite3_exec(handle_, sql.c_str(), nullptr, nullptr, &errmsg) != SQLITE_OK) {
        std::string msg = errmsg ? errmsg : "unknown error";
        sqlite3_free(errmsg);
        raise(ErrorKind::Engine, msg + "\nSQL: " + sql);
    }
}

Stmt Db::prepare(const std::string& sql) { return Stmt(*this, sql); }

Stmt::Stmt(Db& db, const std::string& sql) : sql_(sql), db_(&db) {
    if (sqlite3_prepare_v2(db.handle_, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK)
        raise(ErrorKind::Engine,
              std::string(sqlite3_errmsg(db.handle_)) + "\nSQL: " + sql);
}

Stmt::~Stmt() {
    if (stmt_) sqlite3_finalize(stmt_);
}

Stmt::Stmt(Stmt&& other) noexcept : stmt_(other.stmt_), sql_(std::move(other.sql_)), db_(other.db_) {
    other.stmt_ = nullptr;
}

void Stmt::bind(int index, const SqlValue& value) {
    int rc;
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
        rc = sqlite3_bind_int64(stmt_, index, *i);
    } else if (const auto* d = std::get_if<double>(&value)) {
        rc = sqlite3_bind_double(stmt_, index, *d);
    } else if (const auto* s = std::get_if<std::string>(&value)) {
        rc = sqlite3_bind_text(stmt_, index, s->c_str(), static_cast<int>(s->size()),
                               SQLITE_TRANSIENT);
    } else {
        rc = sqlite3_bind_null(stmt_, index);
    }
    if (rc != SQLITE_OK)
        raise(ErrorKind::Engine, "bind failed at index " + std::to_string(index));
}

bool Stmt::step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    std::string msg = sqlite3_errmsg(db_->handle_);
    if (rc == SQLITE_CONSTRAINT)
        raise(ErrorKind::ConstraintViolation, msg);
    raise(ErrorKind::Engine, msg + "\nSQL: " + sql_);
}

void Stmt::reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
}

int Stmt::column_count() const { return sqlite3_column_count(stmt_); }

SqlValue Stmt::column(int index) const {
    switch (sqlite3_column_type(stmt_, index)) {
        case SQLITE_NULL:
            return std::monostate{};
        case SQLITE_INTEGER:
            return static_cast<std::int64_t>(sqlite3_column_int64(stmt_, index));
        case SQLITE_FLOAT:
            return sqlite3_column_double(stmt_, index);
        default: {
            const unsigned char* text = sqlite3_column_text(stmt_, index);
            return std::string(reinterpret_cast<const char*>(text),
                               static_cast<std::size_t>(sqlite3_column_bytes(stmt_, index)));
        }
    }
}

}  // namespace obda
