#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obfscore/bytecode.hpp"
#include "obfscore/rng.hpp"
#include "obfscore/tape.hpp"
#include "obfscore/tensor.hpp"

namespace obfscore {

/// Geometry, loss weights and optimizer hyperparameters for the surrogate.
struct ModelConfig {
    uint32_t L = 512;
    uint32_t N = 32;
    uint32_t vocab = 257;
    uint32_t d_model = 256;
    uint32_t n_layers_local = 2;
    uint32_t n_layers_global = 2;
    uint32_t n_heads = 4;
    uint32_t ffn_dim = 1024;  // 4 * d_model
    double dropout = 0.1;
    uint32_t K = 7;
    double lambda_s = 1.0;
    double lambda_aux = 0.1;
    double lambda_feature = 0.01;
    double lr = 5e-4;
    double weight_decay = 1e-4;
    double clip_norm = 0.5;
    uint32_t batch = 24;
    uint32_t epochs = 20;
    uint64_t seed = 42;

    void validate() const;  // throws ShapeError on inconsistent settings

    /// Full-scale settings used for the published configuration.
    static ModelConfig paper_preset();
    /// Small geometry for CPU-scale runs and the test suite.
    static ModelConfig desk_preset();
};

/// Per-feature standardization statistics, fit on the training split only.
struct FeatureStats {
    std::vector<double> mu;
    std::vector<double> sigma;  // floored at 1e-6

    static FeatureStats fit(std::span<const std::vector<double>> feature_rows);
};

/// Z-score aggregation: sum_k (f_k - mu_k) / sigma_k.
double zscore(std::span<const double> f, const FeatureStats& stats);

/// Named, shape-fixed parameter tensors in a stable registration order.
struct Parameters {
    struct Entry {
        std::string name;
        Tensor t;
    };
    std::vector<Entry> entries;

    Tensor& find(std::string_view name);
    const Tensor& find(std::string_view name) const;
    size_t total_scalars() const;

    static Parameters init(const ModelConfig& cfg, uint64_t seed);
};

struct ForwardOutput {
    double s_hat = 0.0;
    double s_tool_hat = 0.0;
    std::vector<double> f_hat;       // K reconstructed features
    std::vector<double> v_contract;  // pooled d-dim representation
};

/// Collects attention matrices (softmax outputs) when requested.
struct ForwardDebug {
    std::vector<Tensor> attention;
};

/// Tape node handles for the model outputs of one example.
struct ForwardNodes {
    Tape::Id s_hat = -1;
    Tape::Id s_tool_hat = -1;
    Tape::Id f_hat = -1;
    Tape::Id v_contract = -1;
};

/// Builds the forward graph for one contract on the given tape. Leaf nodes for
/// every parameter tensor are created on first use; their ids are exposed so a
/// training step can read gradients back per parameter.
class ModelGraph {
public:
    ModelGraph(Tape& tape, const Parameters& params, const ModelConfig& cfg);

    ForwardNodes forward(const TokenSequence& t, const FeatureStats& stats, bool training,
                         Rng* dropout_rng, ForwardDebug* debug = nullptr);

    Tape::Id param_node(size_t entry_index) const { return param_nodes_[entry_index]; }
    size_t param_count() const { return param_nodes_.size(); }

private:
    Tape::Id encoder_stack(std::string_view prefix, uint32_t n_layers, Tape::Id x, bool training,
                           Rng* rng, ForwardDebug* debug);
    Tape::Id dropout(Tape::Id x, bool training, Rng* rng);
    Tape::Id p(std::string_view name) const;

    Tape& tape_;
    const Parameters& params_;
    const ModelConfig& cfg_;
    std::vector<Tape::Id> param_nodes_;
    std::vector<std::string> names_;
};

/// Inference-mode forward (dropout off, tape not recording).
ForwardOutput forward(const TokenSequence& t, const Parameters& params, const FeatureStats& stats,
                      const ModelConfig& cfg, ForwardDebug* debug = nullptr);

struct LossTerms {
    double total = 0.0;
    double term_s = 0.0;
    double term_aux = 0.0;
    double term_feature = 0.0;
};

/// Adds one example's contribution to the joint loss on the tape:
///   (lambda_s*(s_hat-s)^2 + lambda_aux*(s_tool_hat-s)^2
///    + lambda_feature*sum_k (f_hat_k-F_k)^2) / batch_size
/// Throws NumericError when targets are not finite.
Tape::Id example_loss(Tape& tape, const ForwardNodes& nodes, double s_tool,
                      std::span<const double> features, const ModelConfig& cfg, size_t batch_size,
                      LossTerms* accumulate = nullptr);

}  // namespace obfscore
