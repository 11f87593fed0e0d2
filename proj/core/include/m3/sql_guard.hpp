#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace m3::sql_guard {

enum class TokenKind {
    keyword,
    identifier,
    string_literal,
    number,
    op,
    punctuation,
    comment,
    whitespace,
};

struct SqlToken {
    TokenKind kind = TokenKind::punctuation;
    std::string text;
    std::size_t offset = 0;
    /// Set on a trailing string literal or block comment that never
    /// closed; classification reports the statement as unparseable.
    bool unterminated = false;
};

enum class VerdictReason {
    ok,
    empty,
    multiple_statements,
    write_verb,
    ddl_verb,
    admin_verb,
    not_a_select,
    unparseable,
};

std::string_view reason_name(VerdictReason reason);

struct ValidationVerdict {
    bool allowed = false;
    VerdictReason reason = VerdictReason::empty;
    /// Offending token text and character offset; empty when allowed.
    std::string detail;
};

/// Lossless lexer: concatenating the text of the returned tokens
/// reproduces the input byte-for-byte, for any input. Keywords are
/// recognized case-insensitively; single quotes use doubled-quote
/// escaping; -- and /* */ comments become comment tokens.
std::vector<SqlToken> tokenize(std::string_view sql);

/// Splits a token stream into statements on semicolons, which by lexer
/// construction never sit inside string literals or comments. Segments
/// that are empty or whitespace-only are dropped, so a single trailing
/// semicolon does not count as a second statement.
std::vector<std::vector<SqlToken>> split_statements(const std::vector<SqlToken>& tokens);

/// Classifies one statement by its leading verb. SELECT and WITH (when
/// the CTE chain feeds a SELECT) are the only reads; everything else
/// maps to a blocked reason.
VerdictReason classify_statement(const std::vector<SqlToken>& statement);

/// The full allow/block decision: exactly one statement, classified ok.
/// Total over arbitrary byte strings, deterministic, side-effect free.
ValidationVerdict validate(std::string_view sql);

} // namespace m3::sql_guard
