#include "m3/backend.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "m3/errors.hpp"
#include "m3/sql_guard.hpp"
#include "sqlite_handle.hpp"

namespace m3::backend {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

Affinity affinity_from_declared(std::string declared) {
    // SQLite's column affinity rules, folded onto the three-way enum.
    const std::string up = [&] {
        std::transform(declared.begin(), declared.end(), declared.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        return declared;
    }();
    if (up.find("INT") != std::string::npos) return Affinity::integer;
    if (up.find("CHAR") != std::string::npos || up.find("CLOB") != std::string::npos ||
        up.find("TEXT") != std::string::npos) {
        return Affinity::text;
    }
    if (up.empty() || up.find("BLOB") != std::string::npos) return Affinity::text;
    if (up.find("REAL") != std::string::npos || up.find("FLOA") != std::string::npos ||
        up.find("DOUB") != std::string::npos) {
        return Affinity::real;
    }
    return Affinity::real; // numeric and everything else
}

/// Strips quoting from an identifier token ("x", `x`, [x]).
std::string unquote(const std::string& text) {
    if (text.size() >= 2 && (text.front() == '"' || text.front() == '`')) {
        const char q = text.front();
        std::string out;
        for (std::size_t i = 1; i + 1 < text.size(); ++i) {
            out += text[i];
            if (text[i] == q && i + 2 < text.size() && text[i + 1] == q) ++i;
        }
        return out;
    }
    if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
        return text.substr(1, text.size() - 2);
    }
    return text;
}

class LocalBackend final : public Backend {
public:
    explicit LocalBackend(const BackendConfig& config)
        : location_(config.location),
          db_(config.location, SQLITE_OPEN_READONLY) {
        // Surface unreadable or non-database files here instead of at
        // the first query.
        try {
            detail::scalar_int(db_.get(), "SELECT COUNT(*) FROM sqlite_master");
        } catch (const QueryError& e) {
            throw OpenError("cannot open database '" + location_ + "': " + e.what());
        }
    }

    std::vector<std::string> list_tables() override {
        detail::SqliteStmt stmt(db_.get(),
                                "SELECT name FROM sqlite_master "
                                "WHERE type = 'table' AND name NOT LIKE 'sqlite_%' "
                                "ORDER BY name");
        std::vector<std::string> names;
        while (stmt.step()) {
            names.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0)));
        }
        return names;
    }

    TableSchema describe_table(const std::string& table) override {
        TableSchema schema;
        schema.table_name = table;
        {
            detail::SqliteStmt stmt(db_.get(),
                                    "SELECT name, type, \"notnull\" FROM pragma_table_info(?)");
            sqlite3_bind_text(stmt.get(), 1, table.c_str(), -1, SQLITE_TRANSIENT);
            while (stmt.step()) {
                ColumnSpec col;
                col.name = reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0));
                col.affinity = affinity_from_declared(
                    reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 1)));
                col.nullable = sqlite3_column_int(stmt.get(), 2) == 0;
                schema.columns.push_back(std::move(col));
            }
        }
        if (schema.columns.empty()) {
            throw NotFoundError("unknown table '" + table +
                                "'; call list_tables to see available tables");
        }
        schema.row_count = detail::scalar_int(
            db_.get(), "SELECT COUNT(*) FROM " + detail::quote_identifier(table));
        return schema;
    }

    ResultSet execute_select(const std::string& sql, int max_rows) override {
        if (max_rows < 1) {
            throw QueryError("max_rows must be at least 1");
        }
        detail::SqliteStmt stmt(db_.get(), sql);
        ResultSet result;
        result.executed_sql = sql;

        const int ncols = sqlite3_column_count(stmt.get());
        result.columns.reserve(static_cast<std::size_t>(ncols));
        for (int c = 0; c < ncols; ++c) {
            const char* name = sqlite3_column_name(stmt.get(), c);
            result.columns.emplace_back(name != nullptr ? name : "");
        }

        // Fetch one row beyond the cap: its existence is the truncation
        // signal, and it is discarded.
        while (stmt.step()) {
            if (result.rows.size() == static_cast<std::size_t>(max_rows)) {
                result.truncated = true;
                break;
            }
            std::vector<Value> row;
            row.reserve(static_cast<std::size_t>(ncols));
            for (int c = 0; c < ncols; ++c) {
                switch (sqlite3_column_type(stmt.get(), c)) {
                    case SQLITE_NULL:
                        row.emplace_back(std::monostate{});
                        break;
                    case SQLITE_INTEGER:
                        row.emplace_back(static_cast<std::int64_t>(
                            sqlite3_column_int64(stmt.get(), c)));
                        break;
                    case SQLITE_FLOAT:
                        row.emplace_back(sqlite3_column_double(stmt.get(), c));
                        break;
                    default: {
                        const auto* text = sqlite3_column_text(stmt.get(), c);
                        const int len = sqlite3_column_bytes(stmt.get(), c);
                        row.emplace_back(std::string(reinterpret_cast<const char*>(text),
                                                     static_cast<std::size_t>(len)));
                        break;
                    }
                }
            }
            result.rows.push_back(std::move(row));
        }
        return result;
    }

    CostEstimate estimate_cost(const std::string& sql) override {
        const auto tokens = sql_guard::tokenize(sql);

        auto significant_at = [&](std::size_t from) -> std::size_t {
            for (std::size_t i = from; i < tokens.size(); ++i) {
                if (tokens[i].kind != sql_guard::TokenKind::whitespace &&
                    tokens[i].kind != sql_guard::TokenKind::comment) {
                    return i;
                }
            }
            return tokens.size();
        };

        // CTE names are not physical tables; skip them. A CTE definition
        // reads as <identifier> AS ( at any depth.
        std::set<std::string> cte_names;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (tokens[i].kind != sql_guard::TokenKind::identifier) continue;
            const std::size_t as_at = significant_at(i + 1);
            if (as_at >= tokens.size() || lower(tokens[as_at].text) != "as") continue;
            const std::size_t paren_at = significant_at(as_at + 1);
            if (paren_at < tokens.size() && tokens[paren_at].text == "(") {
                cte_names.insert(lower(unquote(tokens[i].text)));
            }
        }

        std::set<std::string> tables;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const std::string word = lower(tokens[i].text);
            if (tokens[i].kind != sql_guard::TokenKind::keyword ||
                (word != "from" && word != "join")) {
                continue;
            }
            std::size_t at = significant_at(i + 1);
            if (at >= tokens.size() || tokens[at].kind != sql_guard::TokenKind::identifier) {
                continue; // subquery or end of input
            }
            std::string name = unquote(tokens[at].text);
            const std::size_t dot_at = significant_at(at + 1);
            if (dot_at < tokens.size() && tokens[dot_at].text == ".") {
                const std::size_t tail = significant_at(dot_at + 1);
                if (tail < tokens.size() &&
                    tokens[tail].kind == sql_guard::TokenKind::identifier) {
                    name = unquote(tokens[tail].text); // schema-qualified
                }
            }
            if (cte_names.count(lower(name)) == 0) {
                tables.insert(lower(name));
            }
        }

        CostEstimate estimate;
        for (const auto& name : tables) {
            detail::SqliteStmt stmt(db_.get(),
                                    "SELECT name FROM sqlite_master "
                                    "WHERE type = 'table' AND lower(name) = ?");
            sqlite3_bind_text(stmt.get(), 1, name.c_str(), -1, SQLITE_TRANSIENT);
            if (!stmt.step()) {
                throw NotFoundError("unknown table '" + name +
                                    "'; call list_tables to see available tables");
            }
            const std::string canonical =
                reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0));
            estimate.estimated_rows_scanned += detail::scalar_int(
                db_.get(), "SELECT COUNT(*) FROM " + detail::quote_identifier(canonical));
        }
        return estimate;
    }

    BackendKind kind() const override { return BackendKind::local; }
    const std::string& location() const override { return location_; }

private:
    std::string location_;
    detail::SqliteDb db_;
};

class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(const BackendConfig& config) : location_(config.location) {}

    std::vector<std::string> list_tables() override { return fail("list_tables"); }
    TableSchema describe_table(const std::string&) override {
        fail("describe_table");
        return {};
    }
    ResultSet execute_select(const std::string&, int) override {
        fail("execute_select");
        return {};
    }
    CostEstimate estimate_cost(const std::string&) override {
        fail("estimate_cost");
        return {};
    }
    BackendKind kind() const override { return BackendKind::remote; }
    const std::string& location() const override { return location_; }

private:
    [[noreturn]] std::vector<std::string> fail(const std::string& op) const {
        throw NotImplementedError("remote backend (" + location_ + "): " + op +
                                  " is not implemented in this build");
    }

    std::string location_;
};

} // namespace

std::string_view affinity_name(Affinity affinity) {
    switch (affinity) {
        case Affinity::integer: return "integer";
        case Affinity::real: return "real";
        case Affinity::text: return "text";
    }
    return "text";
}

std::unique_ptr<Backend> open(const BackendConfig& config) {
    if (config.kind == BackendKind::remote) {
        return std::make_unique<RemoteBackend>(config);
    }
    return std::make_unique<LocalBackend>(config);
}

} // namespace m3::backend
