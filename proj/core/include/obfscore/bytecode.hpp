#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "obfscore/keccak.hpp"

namespace obfscore {

/// Raw on-chain runtime bytecode as collected: hex text, optionally 0x-prefixed.
struct RawBytecode {
    std::string hex_text;
};

/// Normalized, metadata-stripped runtime byte sequence. canonical_hash is the
/// dedup and reuse identity used everywhere downstream.
struct CanonicalBytecode {
    std::vector<uint8_t> bytes;
    Hash32 canonical_hash{};
    uint32_t original_len = 0;
    uint32_t stripped_len = 0;
};

/// One decoded instruction from a linear sweep.
struct OpcodeItem {
    uint32_t offset = 0;
    uint8_t opcode = 0;
    std::vector<uint8_t> immediate;  // zero-padded to the PUSH width when truncated
    bool truncated = false;
};

struct OpcodeStream {
    std::vector<OpcodeItem> items;
};

/// Model input: N segments of L tokens plus a per-segment validity mask.
/// Token values are byte values (0..255); 0 doubles as the padding token.
struct TokenSequence {
    uint32_t L = 0;
    uint32_t N = 0;
    std::vector<uint16_t> tokens;  // N*L, row-major by segment
    std::vector<uint8_t> mask;     // N flags, monotone (valid prefix)
    uint32_t truncated_bytes = 0;

    uint16_t token(uint32_t segment, uint32_t pos) const { return tokens[segment * L + pos]; }
    uint32_t valid_segments() const {
        uint32_t n = 0;
        for (uint8_t m : mask) n += m;
        return n;
    }
};

/// Hex decode with prefix/case tolerance. Throws MalformedHex.
std::vector<uint8_t> normalize(const RawBytecode& raw);

/// Removes a trailing compiler metadata blob when the last two bytes encode a
/// big-endian length m with m+2 <= len and the m bytes before them start with
/// a CBOR map header (major type 5). Computes the canonical hash of the result.
/// Throws EmptyBytecode on empty input.
CanonicalBytecode strip_metadata(std::span<const uint8_t> bytes);

/// Single linear-sweep disassembly. Total over all byte sequences: PUSHk
/// consumes k immediate bytes (zero-padded and flagged when cut off at the
/// end of code); every other byte is a single-byte item.
OpcodeStream decode(std::span<const uint8_t> bytes);

/// Slices canonical bytes into N segments of L tokens with padding token 0.
/// Bytes beyond N*L are truncated and counted.
TokenSequence segment(const CanonicalBytecode& c, uint32_t L, uint32_t N);

/// Reassembles raw bytes from a decoded stream (inverse of decode up to
/// truncated-immediate zero padding).
std::vector<uint8_t> stream_bytes(const OpcodeStream& s);

/// Canonical hash of the bytecode with every PUSH immediate zeroed; collapses
/// near-duplicates that differ only in embedded constants such as addresses.
Hash32 skeleton_hash(std::span<const uint8_t> bytes);

}  // namespace obfscore
