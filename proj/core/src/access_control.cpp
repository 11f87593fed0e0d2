#include "m3/access_control.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/params.h>

#include <array>
#include <memory>
#include <nlohmann/json.hpp>

#include "m3/base64.hpp"
#include "m3/render.hpp"

namespace m3::access_control {

namespace {

using nlohmann::json;

std::array<unsigned char, 32> hmac_sha256(std::string_view key, std::string_view message) {
    std::array<unsigned char, 32> digest{};

    const std::unique_ptr<EVP_MAC, decltype(&EVP_MAC_free)> mac(
        EVP_MAC_fetch(nullptr, "HMAC", nullptr), EVP_MAC_free);
    if (!mac) throw Error("HMAC not available in this OpenSSL build");
    const std::unique_ptr<EVP_MAC_CTX, decltype(&EVP_MAC_CTX_free)> ctx(
        EVP_MAC_CTX_new(mac.get()), EVP_MAC_CTX_free);
    if (!ctx) throw Error("cannot create HMAC context");

    char digest_name[] = "SHA256";
    const OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
        OSSL_PARAM_construct_end(),
    };
    static const unsigned char empty = 0;
    const auto* key_data =
        key.empty() ? &empty : reinterpret_cast<const unsigned char*>(key.data());
    std::size_t out_len = 0;
    if (EVP_MAC_init(ctx.get(), key_data, key.size(), params) != 1 ||
        EVP_MAC_update(ctx.get(), reinterpret_cast<const unsigned char*>(message.data()),
                       message.size()) != 1 ||
        EVP_MAC_final(ctx.get(), digest.data(), &out_len, digest.size()) != 1 ||
        out_len != digest.size()) {
        throw Error("HMAC-SHA256 computation failed");
    }
    return digest;
}

bool constant_time_equal(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    unsigned char acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc |= static_cast<unsigned char>(a[i]) ^ static_cast<unsigned char>(b[i]);
    }
    return acc == 0;
}

json parse_segment(std::string_view segment, const char* what) {
    const auto decoded = base64::decode(segment);
    if (!decoded) {
        throw AuthError(AuthErrorKind::malformed, std::string(what) + " is not valid base64url");
    }
    json parsed = json::parse(*decoded, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw AuthError(AuthErrorKind::malformed, std::string(what) + " is not a JSON object");
    }
    return parsed;
}

} // namespace

std::string_view auth_error_code(AuthErrorKind kind) {
    switch (kind) {
        case AuthErrorKind::malformed: return "token-malformed";
        case AuthErrorKind::invalid: return "token-invalid";
        case AuthErrorKind::expired: return "token-expired";
        case AuthErrorKind::rejected: return "token-rejected";
    }
    return "token-invalid";
}

AccessClaims verify_token(std::string_view token, std::string_view key,
                          std::string_view expected_issuer, std::string_view expected_audience,
                          std::int64_t now, std::int64_t leeway) {
    const auto first_dot = token.find('.');
    const auto second_dot = first_dot == std::string_view::npos
                                ? std::string_view::npos
                                : token.find('.', first_dot + 1);
    if (first_dot == std::string_view::npos || second_dot == std::string_view::npos ||
        token.find('.', second_dot + 1) != std::string_view::npos) {
        throw AuthError(AuthErrorKind::malformed, "expected three dot-separated segments");
    }
    const std::string_view header_b64 = token.substr(0, first_dot);
    const std::string_view payload_b64 = token.substr(first_dot + 1, second_dot - first_dot - 1);
    const std::string_view signature_b64 = token.substr(second_dot + 1);

    const json header = parse_segment(header_b64, "header");
    // Pin the algorithm before looking at anything else; "none" and
    // asymmetric confusion both die here.
    if (!header.contains("alg") || !header["alg"].is_string() ||
        header["alg"].get<std::string>() != "HS256") {
        throw AuthError(AuthErrorKind::invalid, "algorithm must be HS256");
    }

    const auto signature = base64::decode(signature_b64);
    if (!signature) {
        throw AuthError(AuthErrorKind::malformed, "signature is not valid base64url");
    }
    const std::string signing_input =
        std::string(header_b64) + "." + std::string(payload_b64);
    const auto expected = hmac_sha256(key, signing_input);
    if (!constant_time_equal(
            *signature,
            std::string_view(reinterpret_cast<const char*>(expected.data()), expected.size()))) {
        throw AuthError(AuthErrorKind::invalid, "signature mismatch");
    }

    const json payload = parse_segment(payload_b64, "payload");
    if (!payload.contains("exp") || !payload["exp"].is_number()) {
        throw AuthError(AuthErrorKind::invalid, "missing exp claim");
    }
    AccessClaims claims;
    claims.expiry = payload["exp"].get<std::int64_t>();
    if (claims.expiry <= now - leeway) {
        throw AuthError(AuthErrorKind::expired,
                        "token expired at " + std::to_string(claims.expiry));
    }
    claims.issuer = payload.value("iss", std::string{});
    claims.audience = payload.value("aud", std::string{});
    if (claims.issuer != expected_issuer) {
        throw AuthError(AuthErrorKind::rejected, "issuer mismatch");
    }
    if (claims.audience != expected_audience) {
        throw AuthError(AuthErrorKind::rejected, "audience mismatch");
    }
    claims.subject = payload.value("sub", std::string{});
    if (payload.contains("scopes") && payload["scopes"].is_array()) {
        for (const auto& scope : payload["scopes"]) {
            if (scope.is_string()) claims.scopes.insert(scope.get<std::string>());
        }
    } else if (payload.contains("scope") && payload["scope"].is_string()) {
        // OAuth-style space-separated scope string.
        const std::string scope = payload["scope"].get<std::string>();
        std::size_t start = 0;
        while (start < scope.size()) {
            const auto end = scope.find(' ', start);
            const auto piece = scope.substr(start, end - start);
            if (!piece.empty()) claims.scopes.insert(piece);
            if (end == std::string::npos) break;
            start = end + 1;
        }
    }
    return claims;
}

RateDecision RateLimiter::check(const std::string& user, std::int64_t now,
                                const RatePolicy& policy) {
    const std::int64_t window = now / policy.window_seconds;
    std::lock_guard<std::mutex> lock(mutex_);
    Bucket& bucket = buckets_[user];
    if (bucket.window != window) {
        bucket.window = window;
        bucket.count = 0;
    }
    if (bucket.count < policy.max_requests) {
        ++bucket.count;
        return {true, 0};
    }
    return {false, (window + 1) * policy.window_seconds - now};
}

void RateLimiter::reset() {
    std::lock_guard<std::mutex> lock(mutex_);
    buckets_.clear();
}

ResultSet enforce_output(ResultSet result, const OutputPolicy& policy) {
    if (result.rows.size() > static_cast<std::size_t>(policy.max_rows)) {
        result.rows.resize(static_cast<std::size_t>(policy.max_rows));
        result.truncated = true;
    }
    while (!result.rows.empty() && render::result_table(result).size() > policy.max_bytes) {
        result.rows.pop_back();
        result.truncated = true;
    }
    return result;
}

} // namespace m3::access_control
