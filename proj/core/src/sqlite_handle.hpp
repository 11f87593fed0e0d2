#pragma once

#include <sqlite3.h>

#include <cstdint>
#include <string>
#include <utility>

#include "m3/errors.hpp"

namespace m3::detail {

/// Thin RAII wrapper over sqlite3*. Shared by the read-only backend and
/// the write-side ETL; not part of the installed interface.
class SqliteDb {
public:
    SqliteDb() = default;

    SqliteDb(const std::string& path, int flags) {
        if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
            std::string msg = db_ != nullptr ? sqlite3_errmsg(db_) : "out of memory";
            if (db_ != nullptr) sqlite3_close(db_);
            db_ = nullptr;
            throw OpenError("cannot open database '" + path + "': " + msg);
        }
        sqlite3_extended_result_codes(db_, 1);
    }

    SqliteDb(SqliteDb&& other) noexcept : db_(std::exchange(other.db_, nullptr)) {}
    SqliteDb& operator=(SqliteDb&& other) noexcept {
        if (this != &other) {
            close();
            db_ = std::exchange(other.db_, nullptr);
        }
        return *this;
    }
    SqliteDb(const SqliteDb&) = delete;
    SqliteDb& operator=(const SqliteDb&) = delete;
    ~SqliteDb() { close(); }

    sqlite3* get() const { return db_; }
    explicit operator bool() const { return db_ != nullptr; }

    void close() {
        if (db_ != nullptr) {
            sqlite3_close(db_);
            db_ = nullptr;
        }
    }

    std::string error_message() const {
        return db_ != nullptr ? sqlite3_errmsg(db_) : "no database";
    }

private:
    sqlite3* db_ = nullptr;
};

class SqliteStmt {
public:
    SqliteStmt(sqlite3* db, const std::string& sql) {
        if (sqlite3_prepare_v2(db, sql.c_str(), static_cast<int>(sql.size()), &stmt_, nullptr) !=
            SQLITE_OK) {
            throw QueryError(sqlite3_errmsg(db));
        }
    }

    SqliteStmt(const SqliteStmt&) = delete;
    SqliteStmt& operator=(const SqliteStmt&) = delete;
    ~SqliteStmt() {
        if (stmt_ != nullptr) sqlite3_finalize(stmt_);
    }

    sqlite3_stmt* get() const { return stmt_; }

    /// True while rows remain; throws QueryError on engine failure.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw QueryError(sqlite3_errmsg(sqlite3_db_handle(stmt_)));
    }

private:
    sqlite3_stmt* stmt_ = nullptr;
};

inline std::string quote_identifier(const std::string& name) {
    std::string quoted = "\"";
    for (char c : name) {
        quoted += c;
        if (c == '"') quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline std::int64_t scalar_int(sqlite3* db, const std::string& sql) {
    SqliteStmt stmt(db, sql);
    if (!stmt.step()) {
        throw QueryError("query returned no rows: " + sql);
    }
    return sqlite3_column_int64(stmt.get(), 0);
}

} // namespace m3::detail
