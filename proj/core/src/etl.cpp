#include "m3/etl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <utility>

#include "csv_reader.hpp"
#include "m3/errors.hpp"
#include "sqlite_handle.hpp"

namespace m3::etl {

namespace {

using backend::Affinity;
using backend::ColumnSpec;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' ||
                          s.front() == '\n')) {
        s.remove_prefix(1);
    }
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_int(std::string_view text, std::int64_t& out) {
    if (text.empty()) return false;
    std::size_t start = (text[0] == '+' || text[0] == '-') ? 1 : 0;
    if (start == text.size()) return false;
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    const char* first = text.data() + (text[0] == '+' ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

bool looks_like_real(std::string_view text) {
    // [+-]? (digits [. digits*] | . digits) ([eE][+-]?digits)?
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
    std::size_t digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        ++i;
        ++digits;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            ++digits;
        }
    }
    if (digits == 0) return false;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            ++exp_digits;
        }
        if (exp_digits == 0) return false;
    }
    return i == text.size();
}

bool parse_real(std::string_view text, double& out) {
    if (!looks_like_real(text)) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

std::string sanitize_name(std::string_view raw) {
    std::string name;
    name.reserve(raw.size());
    for (char c : raw) {
        const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        name += ((lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9') || lc == '_') ? lc : '_';
    }
    if (name.empty() || (name[0] >= '0' && name[0] <= '9')) {
        name.insert(name.begin(), '_');
    }
    return name;
}

std::optional<std::string> table_stem(const std::filesystem::path& path, bool& compressed) {
    std::string name = path.filename().string();
    compressed = false;
    if (name.size() > 7 && name.ends_with(".csv.gz")) {
        compressed = true;
        return name.substr(0, name.size() - 7);
    }
    if (name.size() > 4 && name.ends_with(".csv")) {
        return name.substr(0, name.size() - 4);
    }
    return std::nullopt;
}

void collect_dir(const std::filesystem::path& dir, const std::string& prefix,
                 std::vector<CsvSource>& out) {
    std::error_code ec;
    std::filesystem::directory_iterator it(dir, ec);
    if (ec) {
        throw LoadError("cannot read directory '" + dir.string() + "': " + ec.message());
    }
    for (const auto& entry : it) {
        if (!entry.is_regular_file()) continue;
        bool compressed = false;
        const auto stem = table_stem(entry.path(), compressed);
        if (!stem) continue;
        CsvSource source;
        source.path = entry.path();
        source.module_prefix = prefix;
        source.table_name =
            sanitize_name(prefix.empty() ? *stem : prefix + "_" + *stem);
        source.compressed = compressed;
        out.push_back(std::move(source));
    }
}

void exec_or_throw(sqlite3* db, const std::string& sql) {
    char* errmsg = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &errmsg) != SQLITE_OK) {
        std::string msg = errmsg != nullptr ? errmsg : "unknown engine error";
        sqlite3_free(errmsg);
        throw LoadError(msg);
    }
}

const char* declared_type(Affinity affinity) {
    switch (affinity) {
        case Affinity::integer: return "INTEGER";
        case Affinity::real: return "REAL";
        case Affinity::text: return "TEXT";
    }
    return "TEXT";
}

std::vector<std::string> read_header(detail::CsvReader& reader, const CsvSource& source) {
    std::vector<std::string> header;
    if (!reader.next_record(header) || header.empty() ||
        (header.size() == 1 && trim(header[0]).empty())) {
        throw LoadError("no header row in '" + source.path.string() + "'");
    }
    std::vector<std::string> names;
    std::set<std::string> seen;
    names.reserve(header.size());
    for (const auto& cell : header) {
        std::string name = sanitize_name(std::string(trim(cell)));
        std::string candidate = name;
        for (int suffix = 2; seen.count(candidate) > 0; ++suffix) {
            candidate = name + "_" + std::to_string(suffix);
        }
        seen.insert(candidate);
        names.push_back(std::move(candidate));
    }
    return names;
}

std::vector<ColumnSpec> infer_schema(const CsvSource& source, int sample_rows,
                                     const std::vector<std::string>& null_tokens) {
    detail::CsvReader reader(source.path);
    const auto names = read_header(reader, source);

    std::vector<std::vector<std::optional<std::string>>> samples(names.size());
    std::vector<std::string> record;
    for (int n = 0; n < sample_rows && reader.next_record(record); ++n) {
        if (record.size() != names.size()) continue; // rejected at load time
        for (std::size_t c = 0; c < names.size(); ++c) {
            samples[c].push_back(normalize_null(record[c], null_tokens));
        }
    }

    std::vector<ColumnSpec> schema;
    schema.reserve(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        const InferredType inferred = infer_column_type(samples[c]);
        schema.push_back({names[c], inferred.affinity, inferred.saw_null});
    }
    return schema;
}

} // namespace

const std::vector<std::string>& default_null_tokens() {
    static const std::vector<std::string> tokens = {
        "", "NULL", "null", "None", "___", "N/A", "NA", "?"};
    return tokens;
}

WritableDb::WritableDb(const std::filesystem::path& path) {
    if (sqlite3_open_v2(path.string().c_str(), &db_,
                        SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr) != SQLITE_OK) {
        const std::string msg = db_ != nullptr ? sqlite3_errmsg(db_) : "out of memory";
        if (db_ != nullptr) sqlite3_close(db_);
        db_ = nullptr;
        throw OpenError("cannot create database '" + path.string() + "': " + msg);
    }
}

WritableDb::WritableDb(WritableDb&& other) noexcept : db_(std::exchange(other.db_, nullptr)) {}

WritableDb& WritableDb::operator=(WritableDb&& other) noexcept {
    if (this != &other) {
        close();
        db_ = std::exchange(other.db_, nullptr);
    }
    return *this;
}

WritableDb::~WritableDb() { close(); }

void WritableDb::close() {
    if (db_ != nullptr) {
        sqlite3_close(db_);
        db_ = nullptr;
    }
}

std::vector<CsvSource> discover_files(const std::filesystem::path& root) {
    std::vector<CsvSource> sources;
    collect_dir(root, "", sources);
    for (const char* module : {"hosp", "icu"}) {
        const auto subdir = root / module;
        std::error_code ec;
        if (std::filesystem::is_directory(subdir, ec)) {
            collect_dir(subdir, module, sources);
        }
    }
    std::sort(sources.begin(), sources.end(), [](const CsvSource& a, const CsvSource& b) {
        return std::tie(a.table_name, a.path) < std::tie(b.table_name, b.path);
    });
    return sources;
}

std::optional<std::string> normalize_null(std::string_view cell) {
    return normalize_null(cell, default_null_tokens());
}

std::optional<std::string> normalize_null(std::string_view cell,
                                          const std::vector<std::string>& null_tokens) {
    const std::string_view trimmed = trim(cell);
    for (const auto& token : null_tokens) {
        if (trimmed == token) return std::nullopt;
    }
    return std::string(trimmed);
}

InferredType infer_column_type(const std::vector<std::optional<std::string>>& samples) {
    InferredType inferred{Affinity::integer, false};
    bool any_present = false;
    for (const auto& sample : samples) {
        if (!sample.has_value()) {
            inferred.saw_null = true;
            continue;
        }
        any_present = true;
        if (inferred.affinity == Affinity::integer) {
            std::int64_t i64 = 0;
            if (!parse_int(*sample, i64)) {
                inferred.affinity = Affinity::real;
            }
        }
        if (inferred.affinity == Affinity::real) {
            double d = 0;
            if (!parse_real(*sample, d)) {
                inferred.affinity = Affinity::text;
                break;
            }
        }
    }
    if (!any_present) {
        inferred.affinity = Affinity::text;
    }
    return inferred;
}

LoadStats load_table(WritableDb& db, const CsvSource& source,
                     const std::vector<ColumnSpec>& schema,
                     const std::vector<std::string>& null_tokens) {
    detail::CsvReader reader(source.path);
    const auto header = read_header(reader, source);
    if (header.size() != schema.size()) {
        throw LoadError("header of '" + source.path.string() + "' has " +
                        std::to_string(header.size()) + " columns, schema expects " +
                        std::to_string(schema.size()));
    }

    std::string create = "CREATE TABLE " + detail::quote_identifier(source.table_name) + " (";
    std::string insert = "INSERT INTO " + detail::quote_identifier(source.table_name) + " VALUES (";
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (c > 0) {
            create += ", ";
            insert += ", ";
        }
        create += detail::quote_identifier(schema[c].name);
        create += ' ';
        create += declared_type(schema[c].affinity);
        insert += '?';
    }
    create += ")";
    insert += ")";

    exec_or_throw(db.handle(), "BEGIN");
    LoadStats stats;
    try {
        exec_or_throw(db.handle(), create);
        detail::SqliteStmt stmt(db.handle(), insert);

        std::vector<std::string> record;
        while (reader.next_record(record)) {
            if (record.size() != schema.size()) {
                ++stats.rejected;
                continue;
            }
            for (std::size_t c = 0; c < schema.size(); ++c) {
                const int idx = static_cast<int>(c) + 1;
                const auto cell = normalize_null(record[c], null_tokens);
                if (!cell.has_value()) {
                    sqlite3_bind_null(stmt.get(), idx);
                    continue;
                }
                std::int64_t i64 = 0;
                double d = 0;
                if (schema[c].affinity == Affinity::integer && parse_int(*cell, i64)) {
                    sqlite3_bind_int64(stmt.get(), idx, i64);
                } else if (schema[c].affinity != Affinity::text && parse_real(*cell, d)) {
                    sqlite3_bind_double(stmt.get(), idx, d);
                } else {
                    sqlite3_bind_text(stmt.get(), idx, cell->c_str(),
                                      static_cast<int>(cell->size()), SQLITE_TRANSIENT);
                }
            }
            stmt.step();
            ++stats.inserted;
            sqlite3_reset(stmt.get());
            sqlite3_clear_bindings(stmt.get());
        }
    } catch (...) {
        sqlite3_exec(db.handle(), "ROLLBACK", nullptr, nullptr, nullptr);
        throw;
    }
    exec_or_throw(db.handle(), "COMMIT");
    return stats;
}

BuildReport build_database(const std::filesystem::path& root, const std::filesystem::path& out,
                           const BuildOptions& options) {
    if (std::filesystem::exists(out)) {
        if (!options.overwrite) {
            throw ConfigError("output '" + out.string() +
                              "' already exists; pass --overwrite to rebuild");
        }
        std::filesystem::remove(out);
    }
    const auto& null_tokens =
        options.null_tokens.empty() ? default_null_tokens() : options.null_tokens;
    const auto sources = discover_files(root);

    BuildReport report;
    WritableDb db(out);
    try {
        for (const auto& source : sources) {
            const auto schema = infer_schema(source, options.sample_rows, null_tokens);
            const LoadStats stats = load_table(db, source, schema, null_tokens);
            report.tables += 1;
            report.rows += stats.inserted;
            report.rejected += stats.rejected;
        }
    } catch (...) {
        db.close();
        std::error_code ec;
        std::filesystem::remove(out, ec);
        throw;
    }
    return report;
}

} // namespace m3::etl
