#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace m3 {

/// One cell of a query result. monostate represents SQL NULL.
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;

struct ResultSet {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
    /// True when the engine yielded more rows than the cap, or when a
    /// downstream output policy dropped rows.
    bool truncated = false;
    /// Byte-identical copy of the validated SQL that produced the rows.
    std::string executed_sql;
};

} // namespace m3
