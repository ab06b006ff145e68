#include "obfscore/features.hpp"

#include <algorithm>

#include "obfscore/errors.hpp"
#include "obfscore/hex.hpp"
#include "obfscore/keccak.hpp"
#include "obfscore/metrics.hpp"
#include "obfscore/opcodes.hpp"

namespace obfscore {

Selector selector_from_signature(std::string_view signature) {
    const Hash32 h = keccak256(signature);
    return {h[0], h[1], h[2], h[3]};
}

std::string selector_hex(const Selector& s) { return to_hex(s); }

Selector selector_from_hex(std::string_view hex8) {
    const auto bytes = from_hex(hex8);
    if (bytes.size() != 4) throw MalformedHex("selector must be 4 bytes");
    return {bytes[0], bytes[1], bytes[2], bytes[3]};
}

namespace {

// Selector constants are derived from the signature strings at startup, never
// hand-transcribed.
struct ErcSelectors {
    std::vector<Selector> erc20;
    std::vector<Selector> erc721_fixed;
    Selector safe_transfer_3;
    Selector safe_transfer_4;
};

const ErcSelectors& erc_selectors() {
    static const ErcSelectors s = [] {
        ErcSelectors e;
        e.erc20 = {
            selector_from_signature("totalSupply()"),
            selector_from_signature("balanceOf(address)"),
            selector_from_signature("transfer(address,uint256)"),
            selector_from_signature("approve(address,uint256)"),
            selector_from_signature("transferFrom(address,address,uint256)"),
        };
        e.erc721_fixed = {
            selector_from_signature("balanceOf(address)"),
            selector_from_signature("ownerOf(uint256)"),
            selector_from_signature("approve(address,uint256)"),
            selector_from_signature("setApprovalForAll(address,bool)"),
            selector_from_signature("transferFrom(address,address,uint256)"),
        };
        e.safe_transfer_3 = selector_from_signature("safeTransferFrom(address,address,uint256)");
        e.safe_transfer_4 =
            selector_from_signature("safeTransferFrom(address,address,uint256,bytes)");
        return e;
    }();
    return s;
}

// Minimal forwarder runtime: 10-byte prefix, 20-byte implementation address,
// 15-byte suffix.
constexpr uint8_t kForwarderPrefix[10] = {0x36, 0x3d, 0x3d, 0x37, 0x3d,
                                          0x3d, 0x3d, 0x36, 0x3d, 0x73};
constexpr uint8_t kForwarderSuffix[15] = {0x5a, 0xf4, 0x3d, 0x82, 0x80, 0x3e, 0x90, 0x3d,
                                          0x91, 0x60, 0x2b, 0x57, 0xfd, 0x5b, 0xf3};

bool matches_minimal_forwarder(const std::vector<uint8_t>& bytes) {
    if (bytes.size() != 45) return false;
    return std::equal(std::begin(kForwarderPrefix), std::end(kForwarderPrefix), bytes.begin()) &&
           std::equal(std::begin(kForwarderSuffix), std::end(kForwarderSuffix),
                      bytes.begin() + 30);
}

}  // namespace

SelectorSet extract_selectors(const OpcodeStream& s) {
    SelectorSet set;
    for (const auto& item : s.items) {
        if (item.opcode == op::PUSH4 && !item.truncated)
            set.selectors.insert({item.immediate[0], item.immediate[1], item.immediate[2],
                                  item.immediate[3]});
    }
    return set;
}

double signature_density(const SelectorSet& f, uint32_t byte_len) {
    if (byte_len == 0) throw EmptyBytecode("signature density of empty bytecode");
    return static_cast<double>(f.count()) / (static_cast<double>(byte_len) / 1024.0);
}

ErcFlags classify_erc(const SelectorSet& f) {
    const auto& sel = erc_selectors();
    ErcFlags flags;
    flags.erc20 = std::all_of(sel.erc20.begin(), sel.erc20.end(),
                              [&](const Selector& s) { return f.contains(s); });
    const bool fixed = std::all_of(sel.erc721_fixed.begin(), sel.erc721_fixed.end(),
                                   [&](const Selector& s) { return f.contains(s); });
    flags.erc721 =
        fixed && (f.contains(sel.safe_transfer_3) || f.contains(sel.safe_transfer_4));
    return flags;
}

ProxyFlags proxy_indicator(const OpcodeStream& s, const SelectorSet& f, const FeatureConfig& cfg) {
    ProxyFlags flags;
    bool has_delegatecall = false;
    bool has_returndatacopy = false;
    for (const auto& item : s.items) {
        has_delegatecall |= (item.opcode == op::DELEGATECALL);
        has_returndatacopy |= (item.opcode == op::RETURNDATACOPY);
    }
    flags.proxy =
        has_delegatecall && has_returndatacopy && f.count() <= cfg.proxy_max_selectors;
    flags.minimal = matches_minimal_forwarder(stream_bytes(s));
    return flags;
}

std::map<uint8_t, uint32_t> opcode_histogram(const OpcodeStream& s) {
    std::map<uint8_t, uint32_t> hist;
    for (const auto& item : s.items) ++hist[item.opcode];
    return hist;
}

StructuralFeatures compute_features(const CanonicalBytecode& c, const FeatureConfig& cfg) {
    const OpcodeStream stream = decode(c.bytes);
    const SelectorSet sel = extract_selectors(stream);

    StructuralFeatures f;
    f.byte_len = c.stripped_len;
    f.selector_count = static_cast<uint32_t>(sel.count());
    f.signature_density = signature_density(sel, c.stripped_len);
    const ErcFlags erc = classify_erc(sel);
    f.erc20 = erc.erc20;
    f.erc721 = erc.erc721;
    const ProxyFlags proxy = proxy_indicator(stream, sel, cfg);
    f.proxy = proxy.proxy;
    f.proxy_minimal = proxy.minimal;
    f.opcode_hist = opcode_histogram(stream);
    f.selectors.assign(sel.selectors.begin(), sel.selectors.end());
    return f;
}

CorrelationReport sanity_correlations(std::span<const double> scores,
                                      std::span<const double> byte_len,
                                      std::span<const double> selector_count) {
    if (scores.size() < 2) throw EmptyInput("sanity correlations need >= 2 contracts");
    CorrelationReport r;
    r.n = scores.size();
    r.score_vs_byte_len = pcc(scores, byte_len);
    r.score_vs_selector_count = pcc(scores, selector_count);
    return r;
}

}  // namespace obfscore
