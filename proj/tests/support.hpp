#pragma once

// Test-only helpers: independent reference implementations (oracles) and
// synthetic data generators. Nothing in here may call into the code paths it
// is used to check.

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "obfscore/model.hpp"
#include "obfscore/rng.hpp"

namespace testsupport {

struct RefItem {
    uint32_t offset;
    uint8_t opcode;
    std::vector<uint8_t> immediate;
    bool truncated;
};

/// Second, naive linear-sweep decoder written independently of the library.
std::vector<RefItem> reference_decode(const std::vector<uint8_t>& bytes);

/// Byte-window oracle: re-walks the bytes and collects 4-byte windows after
/// each non-truncated PUSH4.
std::set<std::array<uint8_t, 4>> reference_selectors(const std::vector<uint8_t>& bytes);

// Naive loop recomputations of the evaluation metrics.
double naive_mape(const std::vector<double>& y, const std::vector<double>& yh);
double naive_mae(const std::vector<double>& y, const std::vector<double>& yh);
double naive_mse(const std::vector<double>& y, const std::vector<double>& yh);
double naive_pcc(const std::vector<double>& y, const std::vector<double>& yh);

struct GradCheckReport {
    size_t checked = 0;
    size_t failed = 0;
    double worst_rel = 0.0;
    std::string worst_name;
};

/// Central finite differences (step h) against analytic gradients for every
/// element of every parameter tensor. loss(params) must be deterministic.
/// rel error uses an absolute floor for near-zero entries:
///   fail iff |a - f| >= max(rtol * max(|a|,|f|), atol)
GradCheckReport finite_diff_check(obfscore::Parameters& params,
                                  const std::function<double(const obfscore::Parameters&)>& loss,
                                  const std::vector<obfscore::Tensor>& analytic, double h,
                                  double rtol, double atol, int threads);

/// Random EVM-ish runtime bytecode: mixes plain opcodes with well-formed PUSH
/// instructions; can plant and count PUSH4 selectors.
struct SyntheticContract {
    std::vector<uint8_t> bytes;
    uint32_t push4_count = 0;
};
SyntheticContract synth_bytecode(obfscore::Rng& rng, uint32_t min_len, uint32_t max_len,
                                 uint32_t planted_push4);

/// Hand-built CBOR map of exactly `m` bytes (m >= 1), for trailer fixtures.
std::vector<uint8_t> cbor_map_bytes(uint32_t m);

/// Unique temporary directory under the system temp root.
std::filesystem::path make_temp_dir(const std::string& tag);

}  // namespace testsupport
