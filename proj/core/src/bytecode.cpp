#include "obfscore/bytecode.hpp"

#include <algorithm>

#include "obfscore/errors.hpp"
#include "obfscore/hex.hpp"
#include "obfscore/opcodes.hpp"

namespace obfscore {

std::vector<uint8_t> normalize(const RawBytecode& raw) {
    std::string_view text = raw.hex_text;
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
        text = text.substr(2);
    if (text.empty()) throw MalformedHex("empty bytecode hex");
    return from_hex(text);
}

namespace {

bool is_cbor_map_header(uint8_t b) { return (b >> 5) == 5; }

// Returns the total trailer size (metadata + 2 length bytes) or 0.
size_t trailer_size(std::span<const uint8_t> bytes) {
    const size_t len = bytes.size();
    if (len < 2) return 0;
    const size_t m = static_cast<size_t>(bytes[len - 2]) << 8 | bytes[len - 1];
    if (m == 0 || m + 2 > len) return 0;
    if (!is_cbor_map_header(bytes[len - 2 - m])) return 0;
    // Stripping the whole body would leave an empty contract; keep it intact.
    if (m + 2 == len) return 0;
    return m + 2;
}

}  // namespace

CanonicalBytecode strip_metadata(std::span<const uint8_t> bytes) {
    if (bytes.empty()) throw EmptyBytecode("cannot canonicalize empty bytecode");
    CanonicalBytecode c;
    c.original_len = static_cast<uint32_t>(bytes.size());
    const size_t cut = trailer_size(bytes);
    c.bytes.assign(bytes.begin(), bytes.end() - cut);
    c.stripped_len = static_cast<uint32_t>(c.bytes.size());
    c.canonical_hash = keccak256(std::span<const uint8_t>(c.bytes));
    return c;
}

OpcodeStream decode(std::span<const uint8_t> bytes) {
    OpcodeStream s;
    s.items.reserve(bytes.size());
    size_t i = 0;
    while (i < bytes.size()) {
        OpcodeItem item;
        item.offset = static_cast<uint32_t>(i);
        item.opcode = bytes[i];
        const int k = immediate_size(item.opcode);
        if (k > 0) {
            item.immediate.assign(static_cast<size_t>(k), 0);
            const size_t avail = std::min(static_cast<size_t>(k), bytes.size() - i - 1);
            std::copy_n(bytes.begin() + i + 1, avail, item.immediate.begin());
            item.truncated = avail < static_cast<size_t>(k);
            i += 1 + avail;
        } else {
            i += 1;
        }
        s.items.push_back(std::move(item));
    }
    return s;
}

TokenSequence segment(const CanonicalBytecode& c, uint32_t L, uint32_t N) {
    TokenSequence t;
    t.L = L;
    t.N = N;
    t.tokens.assign(static_cast<size_t>(L) * N, 0);
    t.mask.assign(N, 0);

    const size_t capacity = static_cast<size_t>(L) * N;
    const size_t used = std::min<size_t>(c.bytes.size(), capacity);
    for (size_t i = 0; i < used; ++i) t.tokens[i] = c.bytes[i];
    t.truncated_bytes =
        c.bytes.size() > capacity ? static_cast<uint32_t>(c.bytes.size() - capacity) : 0;

    const uint32_t valid = static_cast<uint32_t>(
        std::min<size_t>((c.bytes.size() + L - 1) / L, N));
    for (uint32_t i = 0; i < valid; ++i) t.mask[i] = 1;
    return t;
}

std::vector<uint8_t> stream_bytes(const OpcodeStream& s) {
    std::vector<uint8_t> out;
    for (const auto& item : s.items) {
        out.push_back(item.opcode);
        out.insert(out.end(), item.immediate.begin(), item.immediate.end());
    }
    return out;
}

Hash32 skeleton_hash(std::span<const uint8_t> bytes) {
    std::vector<uint8_t> skeleton(bytes.begin(), bytes.end());
    size_t i = 0;
    while (i < skeleton.size()) {
        const int k = immediate_size(skeleton[i]);
        const size_t avail = std::min(static_cast<size_t>(k), skeleton.size() - i - 1);
        std::fill_n(skeleton.begin() + i + 1, avail, 0);
        i += 1 + avail;
    }
    return keccak256(std::span<const uint8_t>(skeleton));
}

}  // namespace obfscore
