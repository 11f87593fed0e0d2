#pragma once

#include <string>

#include "m3/result_set.hpp"

namespace m3::render {

/// Renders one value the way the text table does (NULL for nulls,
/// shortest round-trip-ish form for reals).
std::string value_text(const Value& value);

/// Deterministic aligned text table with a row-count footer and, when
/// the set is truncated, a truncation note. This rendering is also the
/// yardstick the output policy measures byte limits against.
std::string result_table(const ResultSet& result);

} // namespace m3::render
