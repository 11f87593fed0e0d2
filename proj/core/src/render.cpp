#include "m3/render.hpp"

#include <algorithm>
#include <cstdio>

namespace m3::render {

namespace {

std::string real_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

} // namespace

std::string value_text(const Value& value) {
    switch (value.index()) {
        case 0: return "NULL";
        case 1: return std::to_string(std::get<std::int64_t>(value));
        case 2: return real_text(std::get<double>(value));
        default: return std::get<std::string>(value);
    }
}

std::string result_table(const ResultSet& result) {
    const std::size_t ncols = result.columns.size();
    std::vector<std::size_t> widths(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
        widths[c] = result.columns[c].size();
    }

    std::vector<std::vector<std::string>> cells;
    cells.reserve(result.rows.size());
    for (const auto& row : result.rows) {
        std::vector<std::string> texts;
        texts.reserve(ncols);
        for (std::size_t c = 0; c < ncols; ++c) {
            texts.push_back(c < row.size() ? value_text(row[c]) : "");
            widths[c] = std::max(widths[c], texts.back().size());
        }
        cells.push_back(std::move(texts));
    }

    auto append_row = [&](std::string& out, const std::vector<std::string>& texts) {
        for (std::size_t c = 0; c < ncols; ++c) {
            out += texts[c];
            if (c + 1 < ncols) {
                out.append(widths[c] - texts[c].size() + 2, ' ');
            }
        }
        out += '\n';
    };

    std::string out;
    if (ncols > 0) {
        append_row(out, result.columns);
        std::vector<std::string> rule;
        rule.reserve(ncols);
        for (std::size_t c = 0; c < ncols; ++c) {
            rule.emplace_back(widths[c], '-');
        }
        append_row(out, rule);
        for (const auto& texts : cells) {
            append_row(out, texts);
        }
    }
    out += "(" + std::to_string(result.rows.size()) +
           (result.rows.size() == 1 ? " row)" : " rows)");
    if (result.truncated) {
        out += "\nnote: result truncated by the row/byte output policy";
    }
    out += '\n';
    return out;
}

} // namespace m3::render
