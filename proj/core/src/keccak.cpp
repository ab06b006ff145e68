#include "obfscore/keccak.hpp"

#include <cstring>

#include "obfscore/errors.hpp"
#include "obfscore/hex.hpp"

namespace obfscore {

namespace {

constexpr uint64_t kRoundConstants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

constexpr int kRotations[24] = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr int kPiLanes[24] = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                              15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

inline uint64_t rotl(uint64_t x, int s) { return (x << s) | (x >> (64 - s)); }

void keccak_f1600(uint64_t st[25]) {
    for (int round = 0; round < 24; ++round) {
        uint64_t bc[5];
        // theta
        for (int i = 0; i < 5; ++i)
            bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
        for (int i = 0; i < 5; ++i) {
            const uint64_t d = bc[(i + 4) % 5] ^ rotl(bc[(i + 1) % 5], 1);
            for (int j = 0; j < 25; j += 5) st[j + i] ^= d;
        }
        // rho + pi
        uint64_t t = st[1];
        for (int i = 0; i < 24; ++i) {
            const int j = kPiLanes[i];
            const uint64_t tmp = st[j];
            st[j] = rotl(t, kRotations[i]);
            t = tmp;
        }
        // chi
        for (int j = 0; j < 25; j += 5) {
            for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
            for (int i = 0; i < 5; ++i) st[j + i] = bc[i] ^ (~bc[(i + 1) % 5] & bc[(i + 2) % 5]);
        }
        // iota
        st[0] ^= kRoundConstants[round];
    }
}

constexpr size_t kRate = 136;  // 1088-bit rate for 256-bit output

}  // namespace

Hash32 keccak256(std::span<const uint8_t> data) {
    uint64_t st[25] = {};
    uint8_t block[kRate];

    size_t remaining = data.size();
    const uint8_t* p = data.data();
    while (remaining >= kRate) {
        for (size_t i = 0; i < kRate / 8; ++i) {
            uint64_t lane;
            std::memcpy(&lane, p + 8 * i, 8);
            st[i] ^= lane;  // little-endian hosts only
        }
        keccak_f1600(st);
        p += kRate;
        remaining -= kRate;
    }

    std::memset(block, 0, kRate);
    if (remaining > 0) std::memcpy(block, p, remaining);
    block[remaining] = 0x01;  // Keccak multi-rate padding (not the SHA-3 0x06 variant)
    block[kRate - 1] |= 0x80;
    for (size_t i = 0; i < kRate / 8; ++i) {
        uint64_t lane;
        std::memcpy(&lane, block + 8 * i, 8);
        st[i] ^= lane;
    }
    keccak_f1600(st);

    Hash32 out;
    std::memcpy(out.data(), st, 32);
    return out;
}

Hash32 keccak256(std::string_view text) {
    return keccak256(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

std::string hash_to_hex(const Hash32& h) { return to_hex(h); }

Hash32 hash_from_hex(std::string_view hex64) {
    const auto bytes = from_hex(hex64);
    if (bytes.size() != 32)
        throw MalformedHex("expected 32-byte digest, got " + std::to_string(bytes.size()));
    Hash32 out;
    std::memcpy(out.data(), bytes.data(), 32);
    return out;
}

}  // namespace obfscore
