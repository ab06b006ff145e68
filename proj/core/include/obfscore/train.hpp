#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "obfscore/errors.hpp"
#include "obfscore/metrics.hpp"
#include "obfscore/model.hpp"

namespace obfscore {

/// One labeled training example.
struct TrainRow {
    TokenSequence tokens;
    double s_tool = 0.0;
    std::vector<double> features;
};

/// Training aborted because the epoch loss exceeded the divergence threshold.
/// Carries the parameters from the last epoch that finished below it.
struct DivergenceError : Error {
    DivergenceError(std::string msg, Parameters last_stable_params)
        : Error(std::move(msg)), last_stable(std::move(last_stable_params)) {}
    Parameters last_stable;
};

/// Decoupled-weight-decay Adam with global-norm gradient clipping.
class AdamW {
public:
    AdamW(const Parameters& params, double lr, double weight_decay, double beta1 = 0.9,
          double beta2 = 0.999, double eps = 1e-8);

    void step(Parameters& params, const std::vector<Tensor>& grads);

private:
    double lr_, wd_, beta1_, beta2_, eps_;
    int t_ = 0;
    std::vector<Tensor> m_, v_;
};

/// Scales gradients in place so the global L2 norm is at most clip_norm.
/// Returns the pre-clip norm.
double clip_global_norm(std::vector<Tensor>& grads, double clip_norm);

struct StepStats {
    LossTerms loss;
    double grad_norm = 0.0;          // before clipping
    double grad_norm_clipped = 0.0;  // after clipping
};

/// One optimizer step over a batch: per-example forward/backward on a fresh
/// tape, gradient accumulation, clipping, AdamW update.
StepStats train_step(Parameters& params, AdamW& opt, std::span<const TrainRow* const> batch,
                     const FeatureStats& stats, const ModelConfig& cfg, Rng& dropout_rng);

struct EpochStats {
    double train_loss = 0.0;
    double term_s = 0.0;
    double term_aux = 0.0;
    double term_feature = 0.0;
    std::optional<EvalReport> val;
};

struct TrainResult {
    Parameters params;
    FeatureStats stats;
    std::vector<EpochStats> history;
};

/// Returning true stops training after the current epoch.
using EarlyStop = std::function<bool(const EpochStats&, uint32_t epoch)>;

/// Deterministic full loop: FeatureStats fit on the training rows, seeded
/// shuffles, per-epoch validation metrics. Throws DivergenceError (with the
/// last stable parameters) when the epoch training loss exceeds 1e6.
TrainResult train_loop(const std::vector<TrainRow>& train, const std::vector<TrainRow>& val,
                       const ModelConfig& cfg, const EarlyStop& early_stop = nullptr);

struct ScoreStats {
    size_t n = 0;
    double total_seconds = 0.0;
    double ms_per_contract = 0.0;
    double contracts_per_second = 0.0;
};

/// Scores token sequences in batches. Batching is a grouping of independent
/// forwards, so batch size cannot change the math.
std::vector<double> score_tokens(std::span<const TokenSequence> tokens, const Parameters& params,
                                 const FeatureStats& stats, const ModelConfig& cfg,
                                 size_t batch_size = 200, ScoreStats* perf = nullptr);

}  // namespace obfscore
