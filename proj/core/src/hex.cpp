#include "obfscore/hex.hpp"

#include "obfscore/errors.hpp"

namespace obfscore {

namespace {

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string_view strip_prefix(std::string_view text) {
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
        return text.substr(2);
    return text;
}

}  // namespace

std::vector<uint8_t> from_hex(std::string_view text) {
    const std::string_view body = strip_prefix(text);
    if (body.size() % 2 != 0)
        throw MalformedHex("odd-length hex string (" + std::to_string(body.size()) + " digits)");
    std::vector<uint8_t> out(body.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(body[2 * i]);
        const int lo = nibble(body[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw MalformedHex("non-hex character at position " + std::to_string(2 * i));
        out[i] = static_cast<uint8_t>(hi << 4 | lo);
    }
    return out;
}

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

std::string normalize_hex_string(std::string_view text) {
    const std::string_view body = strip_prefix(text);
    std::string out(body);
    for (char& c : out)
        if (c >= 'A' && c <= 'F') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

}  // namespace obfscore
