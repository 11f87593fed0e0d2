#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "m3/result_set.hpp"

namespace m3::backend {

enum class BackendKind { local, remote };

struct BackendConfig {
    BackendKind kind = BackendKind::local;
    /// Database file path for the local adapter, endpoint URL for the
    /// remote one.
    std::string location;
    int default_max_rows = 50;
};

enum class Affinity { integer, real, text };

std::string_view affinity_name(Affinity affinity);

struct ColumnSpec {
    std::string name;
    Affinity affinity = Affinity::text;
    bool nullable = true;
};

struct TableSchema {
    std::string table_name;
    std::vector<ColumnSpec> columns;
    std::int64_t row_count = 0;
};

struct CostEstimate {
    std::int64_t estimated_rows_scanned = 0;
};

/// Uniform data-access surface over the local embedded database and the
/// (not yet implemented) remote warehouse. A handle is confined to one
/// thread at a time; open independent handles for parallel readers.
class Backend {
public:
    virtual ~Backend() = default;

    /// User tables, lexicographically sorted; engine internals excluded.
    virtual std::vector<std::string> list_tables() = 0;

    /// Columns in stored order plus a fresh COUNT(*).
    /// Throws NotFoundError for an unknown table.
    virtual TableSchema describe_table(const std::string& table) = 0;

    /// Runs an already-validated read statement, returning at most
    /// max_rows rows. Engine errors surface verbatim as QueryError.
    virtual ResultSet execute_select(const std::string& sql, int max_rows) = 0;

    /// Upper-bound heuristic: sum of row counts of the tables named in
    /// FROM/JOIN clauses.
    virtual CostEstimate estimate_cost(const std::string& sql) = 0;

    virtual BackendKind kind() const = 0;
    virtual const std::string& location() const = 0;
};

/// Opens a backend. The local adapter opens the file in engine-level
/// read-only mode, the second defense layer behind the SQL validator.
/// Throws OpenError when the file is missing or unreadable.
std::unique_ptr<Backend> open(const BackendConfig& config);

} // namespace m3::backend
