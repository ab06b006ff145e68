#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace obfscore {

using Hash32 = std::array<uint8_t, 32>;

/// Keccak-256 (original 0x01 padding, as used for EVM code and selector hashes).
Hash32 keccak256(std::span<const uint8_t> data);
Hash32 keccak256(std::string_view text);

std::string hash_to_hex(const Hash32& h);
Hash32 hash_from_hex(std::string_view hex64);

/// Name of the canonical digest, stamped into every output artifact.
inline constexpr const char* kHashAlgorithm = "keccak256";

}  // namespace obfscore
