#pragma once

#include <cstdint>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "m3/errors.hpp"
#include "m3/result_set.hpp"

namespace m3::access_control {

struct AccessClaims {
    std::string subject;
    std::string issuer;
    std::string audience;
    std::int64_t expiry = 0; // unix seconds
    std::set<std::string> scopes;
};

enum class AuthErrorKind { malformed, invalid, expired, rejected };

/// Machine-readable reason code: token-malformed, token-invalid,
/// token-expired, token-rejected.
std::string_view auth_error_code(AuthErrorKind kind);

class AuthError : public Error {
public:
    AuthError(AuthErrorKind kind, const std::string& message)
        : Error(std::string(auth_error_code(kind)) + ": " + message), kind_(kind) {}

    AuthErrorKind kind() const { return kind_; }

private:
    AuthErrorKind kind_;
};

/// Verifies an HS256 bearer token: structure, signature over
/// header.payload, alg pinned to HS256 (anything else, including
/// "none", is rejected), expiry against now minus leeway, and
/// issuer/audience against the expected values. Throws AuthError.
AccessClaims verify_token(std::string_view token, std::string_view key,
                          std::string_view expected_issuer, std::string_view expected_audience,
                          std::int64_t now, std::int64_t leeway);

struct RatePolicy {
    int max_requests = 60;
    int window_seconds = 60;
};

struct OutputPolicy {
    int max_rows = 50;
    std::size_t max_bytes = 262144;
};

struct RateDecision {
    bool allowed = false;
    /// Seconds until the current window ends; zero when allowed.
    std::int64_t retry_after_seconds = 0;
};

/// Fixed-window per-user counter. Windows are aligned to multiples of
/// window_seconds since the epoch. Safe for concurrent callers even
/// though the current wire loop is sequential.
class RateLimiter {
public:
    RateDecision check(const std::string& user, std::int64_t now, const RatePolicy& policy);
    void reset();

private:
    struct Bucket {
        std::int64_t window = -1;
        int count = 0;
    };

    std::mutex mutex_;
    std::unordered_map<std::string, Bucket> buckets_;
};

/// Applies the output policy: rows beyond max_rows are dropped, then
/// rows are dropped from the tail until the text-table rendering fits
/// max_bytes. Idempotent.
ResultSet enforce_output(ResultSet result, const OutputPolicy& policy);

} // namespace m3::access_control
