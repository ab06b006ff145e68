#pragma once

#include <filesystem>
#include <string>

#include "obfscore/model.hpp"

namespace obfscore {

/// Self-describing model container: version, digest name, config,
/// feature statistics and every named parameter tensor.
struct Checkpoint {
    int version = 1;
    std::string hash_algorithm;
    ModelConfig config;
    FeatureStats stats;
    Parameters params;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const std::string& json_text);

}  // namespace obfscore
