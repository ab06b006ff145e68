#include "obfscore/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace obfscore {

AdamW::AdamW(const Parameters& params, double lr, double weight_decay, double beta1, double beta2,
             double eps)
    : lr_(lr), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.reserve(params.entries.size());
    v_.reserve(params.entries.size());
    for (const auto& e : params.entries) {
        m_.emplace_back(e.t.rows(), e.t.cols());
        v_.emplace_back(e.t.rows(), e.t.cols());
    }
}

void AdamW::step(Parameters& params, const std::vector<Tensor>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < params.entries.size(); ++i) {
        Tensor& theta = params.entries[i].t;
        const Tensor& g = grads[i];
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        for (size_t j = 0; j < theta.size(); ++j) {
            m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
            v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            theta[j] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_) + lr_ * wd_ * theta[j];
        }
    }
}

double clip_global_norm(std::vector<Tensor>& grads, double clip_norm) {
    double sq = 0.0;
    for (const Tensor& g : grads)
        for (size_t j = 0; j < g.size(); ++j) sq += g[j] * g[j];
    const double norm = std::sqrt(sq);
    if (norm > clip_norm && norm > 0.0) {
        const double s = clip_norm / norm;
        for (Tensor& g : grads)
            for (size_t j = 0; j < g.size(); ++j) g[j] *= s;
    }
    return norm;
}

StepStats train_step(Parameters& params, AdamW& opt, std::span<const TrainRow* const> batch,
                     const FeatureStats& stats, const ModelConfig& cfg, Rng& dropout_rng) {
    StepStats out;
    std::vector<Tensor> grads;
    grads.reserve(params.entries.size());
    for (const auto& e : params.entries) grads.emplace_back(e.t.rows(), e.t.cols());

    for (const TrainRow* row : batch) {
        Tape tape(/*recording=*/true);
        ModelGraph graph(tape, params, cfg);
        const ForwardNodes nodes =
            graph.forward(row->tokens, stats, /*training=*/true, &dropout_rng);
        const Tape::Id loss =
            example_loss(tape, nodes, row->s_tool, row->features, cfg, batch.size(), &out.loss);
        tape.backward(loss);
        for (size_t i = 0; i < grads.size(); ++i) {
            const Tensor& g = tape.grad(graph.param_node(i));
            if (g.empty()) continue;  // parameter not on any path to the loss
            for (size_t j = 0; j < grads[i].size(); ++j) grads[i][j] += g[j];
        }
    }

    out.grad_norm = clip_global_norm(grads, cfg.clip_norm);
    out.grad_norm_clipped = std::min(out.grad_norm, cfg.clip_norm);
    opt.step(params, grads);
    return out;
}

TrainResult train_loop(const std::vector<TrainRow>& train, const std::vector<TrainRow>& val,
                       const ModelConfig& cfg, const EarlyStop& early_stop) {
    cfg.validate();
    if (train.empty()) throw EmptyInput("empty training set");

    std::vector<std::vector<double>> feature_rows;
    feature_rows.reserve(train.size());
    for (const auto& r : train) feature_rows.push_back(r.features);

    TrainResult result;
    result.stats = FeatureStats::fit(feature_rows);
    result.params = Parameters::init(cfg, cfg.seed);

    AdamW opt(result.params, cfg.lr, cfg.weight_decay);
    Rng shuffle_rng(cfg.seed ^ 0x5u);
    Rng dropout_rng(cfg.seed ^ 0xdu);

    Parameters last_stable = result.params;
    std::vector<size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        EpochStats es;
        size_t steps = 0;
        for (size_t start = 0; start < order.size(); start += cfg.batch) {
            const size_t end = std::min(order.size(), start + cfg.batch);
            std::vector<const TrainRow*> batch;
            batch.reserve(end - start);
            for (size_t i = start; i < end; ++i) batch.push_back(&train[order[i]]);
            const StepStats ss =
                train_step(result.params, opt, batch, result.stats, cfg, dropout_rng);
            es.train_loss += ss.loss.total;
            es.term_s += ss.loss.term_s;
            es.term_aux += ss.loss.term_aux;
            es.term_feature += ss.loss.term_feature;
            ++steps;
        }
        if (steps > 0) {
            es.train_loss /= static_cast<double>(steps);
            es.term_s /= static_cast<double>(steps);
            es.term_aux /= static_cast<double>(steps);
            es.term_feature /= static_cast<double>(steps);
        }

        if (!std::isfinite(es.train_loss) || es.train_loss > 1e6)
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      " (loss " + std::to_string(es.train_loss) + ")",
                                  std::move(last_stable));
        last_stable = result.params;

        if (!val.empty()) {
            std::vector<double> y, y_hat;
            y.reserve(val.size());
            y_hat.reserve(val.size());
            for (const auto& r : val) {
                y.push_back(r.s_tool);
                y_hat.push_back(forward(r.tokens, result.params, result.stats, cfg).s_hat);
            }
            es.val = evaluate(y, y_hat);
        }

        result.history.push_back(es);
        if (early_stop && early_stop(es, epoch)) break;
    }
    return result;
}

std::vector<double> score_tokens(std::span<const TokenSequence> tokens, const Parameters& params,
                                 const FeatureStats& stats, const ModelConfig& cfg,
                                 size_t batch_size, ScoreStats* perf) {
    if (batch_size == 0) batch_size = 1;
    std::vector<double> scores;
    scores.reserve(tokens.size());
    const auto t0 = std::chrono::steady_clock::now();
    for (size_t start = 0; start < tokens.size(); start += batch_size) {
        const size_t end = std::min(tokens.size(), start + batch_size);
        for (size_t i = start; i < end; ++i)
            scores.push_back(forward(tokens[i], params, stats, cfg).s_hat);
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (perf) {
        perf->n = tokens.size();
        perf->total_seconds = std::chrono::duration<double>(t1 - t0).count();
        if (perf->n > 0 && perf->total_seconds > 0.0) {
            perf->ms_per_contract = perf->total_seconds * 1000.0 / static_cast<double>(perf->n);
            perf->contracts_per_second = static_cast<double>(perf->n) / perf->total_seconds;
        }
    }
    return scores;
}

}  // namespace obfscore
