#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace m3::base64 {

/// Standard alphabet (+/), unpadded output.
std::string encode(std::string_view bytes);

/// URL-safe alphabet (-_), unpadded output, as used by JWT segments.
std::string encode_url(std::string_view bytes);

/// Decodes either alphabet; padding optional. Returns nullopt on any
/// character outside the alphabet or an impossible trailing length.
std::optional<std::string> decode(std::string_view text);

} // namespace m3::base64
