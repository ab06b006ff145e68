#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace obfscore {

/// Decodes a hex string (optional 0x/0X prefix, case-insensitive).
/// Throws MalformedHex on odd length or non-hex characters.
std::vector<uint8_t> from_hex(std::string_view text);

/// Lowercase hex encoding, no prefix.
std::string to_hex(std::span<const uint8_t> bytes);

/// Lowercases a hex string and drops a leading 0x/0X. Does not validate.
std::string normalize_hex_string(std::string_view text);

}  // namespace obfscore
