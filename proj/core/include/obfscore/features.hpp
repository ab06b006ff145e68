#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "obfscore/bytecode.hpp"

namespace obfscore {

using Selector = std::array<uint8_t, 4>;

/// Unique 4-byte function selectors observed as PUSH4 immediates.
struct SelectorSet {
    std::set<Selector> selectors;
    size_t count() const { return selectors.size(); }
    bool contains(const Selector& s) const { return selectors.count(s) > 0; }
};

/// First four bytes of keccak256 over the canonical signature string.
Selector selector_from_signature(std::string_view signature);

std::string selector_hex(const Selector& s);
Selector selector_from_hex(std::string_view hex8);

/// Per-contract structural heuristics.
struct StructuralFeatures {
    uint32_t selector_count = 0;
    double signature_density = 0.0;  // unique selectors per KB of stripped runtime
    uint32_t byte_len = 0;
    bool erc20 = false;
    bool erc721 = false;
    bool proxy = false;
    bool proxy_minimal = false;  // strict 45-byte forwarder template
    std::map<uint8_t, uint32_t> opcode_hist;
    std::vector<Selector> selectors;  // sorted
};

/// Opaque per-contract label features ingested from an external analyzer.
struct ToolFeatureVector {
    std::vector<double> values;
};

struct FeatureConfig {
    uint32_t proxy_max_selectors = 4;  // selector gate for the broad proxy indicator
};

/// The set of all non-truncated PUSH4 immediates (duplicates collapse).
SelectorSet extract_selectors(const OpcodeStream& s);

/// Unique selectors per KB (KB = 1024 bytes). Throws EmptyBytecode on byte_len 0.
double signature_density(const SelectorSet& f, uint32_t byte_len);

/// All-of matching against the core ERC20/ERC721 selector sets.
/// Either safeTransferFrom overload satisfies the ERC721 requirement.
struct ErcFlags {
    bool erc20 = false;
    bool erc721 = false;
};
ErcFlags classify_erc(const SelectorSet& f);

struct ProxyFlags {
    bool proxy = false;
    bool minimal = false;
};

/// Broad delegatecall-forwarding heuristic: DELEGATECALL and RETURNDATACOPY
/// both present and at most proxy_max_selectors unique selectors. The strict
/// minimal-forwarder template (45 bytes, any embedded address) sets `minimal`.
ProxyFlags proxy_indicator(const OpcodeStream& s, const SelectorSet& f,
                           const FeatureConfig& cfg = {});

/// Occurrence counts per opcode; immediates are not opcodes.
std::map<uint8_t, uint32_t> opcode_histogram(const OpcodeStream& s);

/// Everything above in one pass over a canonical contract.
StructuralFeatures compute_features(const CanonicalBytecode& c, const FeatureConfig& cfg = {});

/// Pearson correlation of score against byte length and selector count,
/// with the reference bands the report prints alongside.
struct CorrelationReport {
    double score_vs_byte_len = 0.0;
    double score_vs_selector_count = 0.0;
    size_t n = 0;
};
CorrelationReport sanity_correlations(std::span<const double> scores,
                                      std::span<const double> byte_len,
                                      std::span<const double> selector_count);

}  // namespace obfscore
