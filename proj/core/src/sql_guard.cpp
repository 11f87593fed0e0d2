#include "m3/sql_guard.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace m3::sql_guard {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_hex(char c) {
    return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_word_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_word_char(char c) { return is_word_start(c) || is_digit(c) || c == '$'; }

std::string to_upper(std::string_view text) {
    std::string up(text);
    std::transform(up.begin(), up.end(), up.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return up;
}

const std::unordered_set<std::string>& keyword_set() {
    // SQLite's reserved words plus the portable verbs (MERGE, TRUNCATE,
    // GRANT, REVOKE) the classifier must recognize as statement heads.
    static const std::unordered_set<std::string> kw = {
        "ABORT", "ACTION", "ADD", "AFTER", "ALL", "ALTER", "ALWAYS", "ANALYZE", "AND",
        "AS", "ASC", "ATTACH", "AUTOINCREMENT", "BEFORE", "BEGIN", "BETWEEN", "BY",
        "CASCADE", "CASE", "CAST", "CHECK", "COLLATE", "COLUMN", "COMMIT", "CONFLICT",
        "CONSTRAINT", "CREATE", "CROSS", "CURRENT", "CURRENT_DATE", "CURRENT_TIME",
        "CURRENT_TIMESTAMP", "DATABASE", "DEFAULT", "DEFERRABLE", "DEFERRED", "DELETE",
        "DESC", "DETACH", "DISTINCT", "DO", "DROP", "EACH", "ELSE", "END", "ESCAPE",
        "EXCEPT", "EXCLUDE", "EXCLUSIVE", "EXISTS", "EXPLAIN", "FAIL", "FILTER",
        "FIRST", "FOLLOWING", "FOR", "FOREIGN", "FROM", "FULL", "GENERATED", "GLOB",
        "GRANT", "GROUP", "GROUPS", "HAVING", "IF", "IGNORE", "IMMEDIATE", "IN",
        "INDEX", "INDEXED", "INITIALLY", "INNER", "INSERT", "INSTEAD", "INTERSECT",
        "INTO", "IS", "ISNULL", "JOIN", "KEY", "LAST", "LEFT", "LIKE", "LIMIT",
        "MATCH", "MATERIALIZED", "MERGE", "NATURAL", "NO", "NOT", "NOTHING", "NOTNULL",
        "NULL", "NULLS", "OF", "OFFSET", "ON", "OR", "ORDER", "OTHERS", "OUTER",
        "OVER", "PARTITION", "PLAN", "PRAGMA", "PRECEDING", "PRIMARY", "QUERY",
        "RAISE", "RANGE", "RECURSIVE", "REFERENCES", "REGEXP", "REINDEX", "RELEASE",
        "RENAME", "REPLACE", "RESTRICT", "RETURNING", "REVOKE", "RIGHT", "ROLLBACK",
        "ROW", "ROWS", "SAVEPOINT", "SELECT", "SET", "TABLE", "TEMP", "TEMPORARY",
        "THEN", "TIES", "TO", "TRANSACTION", "TRIGGER", "TRUNCATE", "UNBOUNDED",
        "UNION", "UNIQUE", "UPDATE", "USING", "VACUUM", "VALUES", "VIEW", "VIRTUAL",
        "WHEN", "WHERE", "WINDOW", "WITH", "WITHOUT",
    };
    return kw;
}

const std::unordered_set<std::string> kWriteVerbs = {
    "INSERT", "UPDATE", "DELETE", "REPLACE", "MERGE"};
const std::unordered_set<std::string> kDdlVerbs = {
    "CREATE", "DROP", "ALTER", "TRUNCATE"};
const std::unordered_set<std::string> kAdminVerbs = {
    "ATTACH", "DETACH", "PRAGMA", "VACUUM", "REINDEX", "ANALYZE",
    "GRANT", "REVOKE", "BEGIN", "COMMIT", "ROLLBACK"};

bool significant(const SqlToken& t) {
    return t.kind != TokenKind::whitespace && t.kind != TokenKind::comment;
}

std::string describe(const SqlToken& t) {
    std::string text = t.text;
    if (text.size() > 40) {
        text = text.substr(0, 37) + "...";
    }
    return "'" + text + "' at offset " + std::to_string(t.offset);
}

struct Classified {
    VerdictReason reason;
    std::string detail;
};

VerdictReason verb_reason(const std::string& verb) {
    if (verb == "SELECT" || verb == "WITH") return VerdictReason::ok;
    if (kWriteVerbs.count(verb)) return VerdictReason::write_verb;
    if (kDdlVerbs.count(verb)) return VerdictReason::ddl_verb;
    if (kAdminVerbs.count(verb)) return VerdictReason::admin_verb;
    return VerdictReason::not_a_select;
}

Classified classify_detailed(const std::vector<SqlToken>& statement) {
    const SqlToken* head = nullptr;
    for (const auto& t : statement) {
        if (t.unterminated) {
            return {VerdictReason::unparseable, describe(t)};
        }
        if (head == nullptr && significant(t)) {
            head = &t;
        }
    }
    if (head == nullptr) {
        return {VerdictReason::empty, ""};
    }

    const std::string verb = to_upper(head->text);
    const VerdictReason by_verb = verb_reason(verb);
    if (by_verb != VerdictReason::ok) {
        return {by_verb, describe(*head)};
    }

    // Candidate read statement: the parenthesis structure must balance.
    int depth = 0;
    const SqlToken* first_open = nullptr;
    for (const auto& t : statement) {
        if (t.kind != TokenKind::punctuation) continue;
        if (t.text == "(") {
            if (depth == 0) first_open = &t;
            ++depth;
        } else if (t.text == ")") {
            --depth;
            if (depth < 0) {
                return {VerdictReason::unparseable, describe(t)};
            }
        }
    }
    if (depth != 0) {
        return {VerdictReason::unparseable, describe(*first_open)};
    }

    if (verb == "SELECT") {
        return {VerdictReason::ok, ""};
    }

    // WITH: the statement following the final top-level CTE definition
    // decides. Walk significant tokens at paren depth zero and find the
    // first statement-head verb.
    depth = 0;
    bool past_with = false;
    for (const auto& t : statement) {
        if (!significant(t)) continue;
        if (t.kind == TokenKind::punctuation) {
            if (t.text == "(") ++depth;
            else if (t.text == ")") --depth;
            continue;
        }
        if (depth != 0) continue;
        const std::string word = to_upper(t.text);
        if (!past_with) {
            if (word == "WITH") past_with = true;
            continue;
        }
        if (word == "RECURSIVE") continue;
        if (word == "SELECT") {
            return {VerdictReason::ok, ""};
        }
        const VerdictReason r = verb_reason(word);
        if (r != VerdictReason::ok && r != VerdictReason::not_a_select) {
            return {r, describe(t)};
        }
    }
    return {VerdictReason::not_a_select, describe(*head)};
}

} // namespace

std::string_view reason_name(VerdictReason reason) {
    switch (reason) {
        case VerdictReason::ok: return "ok";
        case VerdictReason::empty: return "empty";
        case VerdictReason::multiple_statements: return "multiple_statements";
        case VerdictReason::write_verb: return "write_verb";
        case VerdictReason::ddl_verb: return "ddl_verb";
        case VerdictReason::admin_verb: return "admin_verb";
        case VerdictReason::not_a_select: return "not_a_select";
        case VerdictReason::unparseable: return "unparseable";
    }
    return "unparseable";
}

std::vector<SqlToken> tokenize(std::string_view sql) {
    std::vector<SqlToken> out;
    const std::size_t n = sql.size();
    std::size_t i = 0;

    auto push = [&](TokenKind kind, std::size_t begin, std::size_t end, bool unterminated = false) {
        out.push_back({kind, std::string(sql.substr(begin, end - begin)), begin, unterminated});
    };

    while (i < n) {
        const char c = sql[i];
        const std::size_t start = i;

        if (is_space(c)) {
            while (i < n && is_space(sql[i])) ++i;
            push(TokenKind::whitespace, start, i);
            continue;
        }
        if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
            i += 2;
            while (i < n && sql[i] != '\n') ++i;
            push(TokenKind::comment, start, i);
            continue;
        }
        if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
            i += 2;
            bool closed = false;
            while (i < n) {
                if (sql[i] == '*' && i + 1 < n && sql[i + 1] == '/') {
                    i += 2;
                    closed = true;
                    break;
                }
                ++i;
            }
            push(TokenKind::comment, start, i, !closed);
            continue;
        }
        if (c == '\'') {
            ++i;
            bool closed = false;
            while (i < n) {
                if (sql[i] == '\'') {
                    if (i + 1 < n && sql[i + 1] == '\'') {
                        i += 2; // doubled quote stays inside the literal
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            push(TokenKind::string_literal, start, i, !closed);
            continue;
        }
        if (c == '"' || c == '`') {
            ++i;
            bool closed = false;
            while (i < n) {
                if (sql[i] == c) {
                    if (i + 1 < n && sql[i + 1] == c) {
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            push(TokenKind::identifier, start, i, !closed);
            continue;
        }
        if (c == '[') {
            ++i;
            bool closed = false;
            while (i < n) {
                if (sql[i] == ']') {
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            push(TokenKind::identifier, start, i, !closed);
            continue;
        }
        if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(sql[i + 1]))) {
            if (c == '0' && i + 1 < n && (sql[i + 1] == 'x' || sql[i + 1] == 'X')) {
                i += 2;
                while (i < n && is_hex(sql[i])) ++i;
            } else {
                while (i < n && is_digit(sql[i])) ++i;
                if (i < n && sql[i] == '.') {
                    ++i;
                    while (i < n && is_digit(sql[i])) ++i;
                }
                if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
                    std::size_t mark = i;
                    ++i;
                    if (i < n && (sql[i] == '+' || sql[i] == '-')) ++i;
                    if (i < n && is_digit(sql[i])) {
                        while (i < n && is_digit(sql[i])) ++i;
                    } else {
                        i = mark; // bare 'e' belongs to the next token
                    }
                }
            }
            push(TokenKind::number, start, i);
            continue;
        }
        if (is_word_start(c)) {
            ++i;
            while (i < n && is_word_char(sql[i])) ++i;
            const auto word = sql.substr(start, i - start);
            const bool kw = keyword_set().count(to_upper(word)) > 0;
            push(kw ? TokenKind::keyword : TokenKind::identifier, start, i);
            continue;
        }

        const std::string_view rest = sql.substr(i);
        if (rest.starts_with("->>")) {
            i += 3;
            push(TokenKind::op, start, i);
            continue;
        }
        static constexpr std::string_view kTwoCharOps[] = {
            "||", "<=", ">=", "<<", ">>", "<>", "==", "!=", "->"};
        bool matched = false;
        for (const auto op : kTwoCharOps) {
            if (rest.starts_with(op)) {
                i += 2;
                push(TokenKind::op, start, i);
                matched = true;
                break;
            }
        }
        if (matched) continue;

        ++i;
        constexpr std::string_view kSingleOps = "+-*/%<>=!|&~^";
        if (kSingleOps.find(c) != std::string_view::npos) {
            push(TokenKind::op, start, i);
        } else {
            // ( ) , ; . and any byte the lexer has no rule for
            push(TokenKind::punctuation, start, i);
        }
    }
    return out;
}

std::vector<std::vector<SqlToken>> split_statements(const std::vector<SqlToken>& tokens) {
    std::vector<std::vector<SqlToken>> statements;
    std::vector<SqlToken> current;

    auto flush = [&]() {
        const bool has_content = std::any_of(current.begin(), current.end(), [](const SqlToken& t) {
            return t.kind != TokenKind::whitespace;
        });
        if (has_content) {
            statements.push_back(std::move(current));
        }
        current.clear();
    };

    for (const auto& t : tokens) {
        if (t.kind == TokenKind::punctuation && t.text == ";") {
            flush();
        } else {
            current.push_back(t);
        }
    }
    flush();
    return statements;
}

VerdictReason classify_statement(const std::vector<SqlToken>& statement) {
    return classify_detailed(statement).reason;
}

ValidationVerdict validate(std::string_view sql) {
    const auto statements = split_statements(tokenize(sql));
    if (statements.empty()) {
        return {false, VerdictReason::empty, ""};
    }
    if (statements.size() > 1) {
        const SqlToken* offender = nullptr;
        for (const auto& t : statements[1]) {
            if (significant(t)) {
                offender = &t;
                break;
            }
        }
        // A comment-only second segment has no significant token.
        const std::string detail = offender != nullptr ? describe(*offender)
                                                       : describe(statements[1].front());
        return {false, VerdictReason::multiple_statements, detail};
    }
    const Classified c = classify_detailed(statements.front());
    return {c.reason == VerdictReason::ok, c.reason, c.detail};
}

} // namespace m3::sql_guard
