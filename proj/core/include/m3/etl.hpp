#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "m3/backend.hpp"

struct sqlite3;

namespace m3::etl {

struct CsvSource {
    std::filesystem::path path;
    /// "hosp", "icu", or "" for files at the root of the export.
    std::string module_prefix;
    /// Derived name: <prefix>_<stem> when a prefix exists, else <stem>,
    /// sanitized to [a-z_][a-z0-9_]*.
    std::string table_name;
    bool compressed = false;
};

struct InferredType {
    backend::Affinity affinity = backend::Affinity::text;
    bool saw_null = false;
};

struct LoadStats {
    std::int64_t inserted = 0;
    std::int64_t rejected = 0;
};

struct BuildReport {
    int tables = 0;
    std::int64_t rows = 0;
    std::int64_t rejected = 0;
};

struct BuildOptions {
    bool overwrite = false;
    /// Rows sampled per table for type inference.
    int sample_rows = 1000;
    /// Cells treated as SQL NULL after whitespace trimming.
    std::vector<std::string> null_tokens;
};

const std::vector<std::string>& default_null_tokens();

/// Write-side database connection. Building the database is the one
/// code path in the system that opens a file writable.
class WritableDb {
public:
    explicit WritableDb(const std::filesystem::path& path);
    WritableDb(WritableDb&& other) noexcept;
    WritableDb& operator=(WritableDb&& other) noexcept;
    WritableDb(const WritableDb&) = delete;
    WritableDb& operator=(const WritableDb&) = delete;
    ~WritableDb();

    sqlite3* handle() const { return db_; }
    void close();

private:
    sqlite3* db_ = nullptr;
};

/// Finds every *.csv and *.csv.gz at the root and inside the hosp/ and
/// icu/ subdirectories, in table-name order.
std::vector<CsvSource> discover_files(const std::filesystem::path& root);

/// Trims surrounding whitespace, then maps null tokens to absent.
std::optional<std::string> normalize_null(std::string_view cell);
std::optional<std::string> normalize_null(std::string_view cell,
                                          const std::vector<std::string>& null_tokens);

/// Least-general affinity consistent with every present sample
/// (integer before real before text). All-absent columns are text.
InferredType infer_column_type(const std::vector<std::optional<std::string>>& samples);

/// Creates the table and bulk-loads the source inside one transaction.
/// Rows whose field count does not match the header are rejected and
/// counted, never inserted.
LoadStats load_table(WritableDb& db, const CsvSource& source,
                     const std::vector<backend::ColumnSpec>& schema,
                     const std::vector<std::string>& null_tokens = default_null_tokens());

/// Full pipeline: discovery, per-table inference over the sample
/// prefix, load. Any table failure aborts the build and removes the
/// partial output file.
BuildReport build_database(const std::filesystem::path& root, const std::filesystem::path& out,
                           const BuildOptions& options = {});

} // namespace m3::etl
