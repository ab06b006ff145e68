#include "obfscore/model.hpp"

#include <array>
#include <cmath>

#include "obfscore/errors.hpp"

namespace obfscore {

void ModelConfig::validate() const {
    if (d_model == 0 || n_heads == 0 || L == 0 || N == 0 || K == 0)
        throw ShapeError("model dimensions must be positive");
    if (d_model % n_heads != 0) throw ShapeError("d_model must be divisible by n_heads");
    if (vocab < 257) throw ShapeError("vocab must cover byte tokens plus padding (>= 257)");
    if (lambda_s < 0 || lambda_aux < 0 || lambda_feature < 0)
        throw ShapeError("loss weights must be nonnegative");
    if (batch == 0) throw ShapeError("batch must be positive");
}

ModelConfig ModelConfig::paper_preset() { return ModelConfig{}; }

ModelConfig ModelConfig::desk_preset() {
    ModelConfig c;
    c.L = 64;
    c.N = 8;
    c.d_model = 32;
    c.n_layers_local = 1;
    c.n_layers_global = 1;
    c.n_heads = 2;
    c.ffn_dim = 128;
    c.dropout = 0.0;
    c.K = 7;
    return c;
}

FeatureStats FeatureStats::fit(std::span<const std::vector<double>> feature_rows) {
    if (feature_rows.empty()) throw EmptyInput("feature stats need at least one row");
    const size_t k = feature_rows[0].size();
    FeatureStats s;
    s.mu.assign(k, 0.0);
    s.sigma.assign(k, 0.0);
    for (const auto& row : feature_rows) {
        if (row.size() != k) throw ShapeError("inconsistent feature width");
        for (size_t i = 0; i < k; ++i) s.mu[i] += row[i];
    }
    const double n = static_cast<double>(feature_rows.size());
    for (size_t i = 0; i < k; ++i) s.mu[i] /= n;
    for (const auto& row : feature_rows)
        for (size_t i = 0; i < k; ++i) {
            const double d = row[i] - s.mu[i];
            s.sigma[i] += d * d;
        }
    for (size_t i = 0; i < k; ++i) s.sigma[i] = std::max(std::sqrt(s.sigma[i] / n), 1e-6);
    return s;
}

double zscore(std::span<const double> f, const FeatureStats& stats) {
    if (f.size() != stats.mu.size()) throw ShapeError("feature width does not match stats");
    double acc = 0.0;
    for (size_t k = 0; k < f.size(); ++k) acc += (f[k] - stats.mu[k]) / stats.sigma[k];
    return acc;
}

Tensor& Parameters::find(std::string_view name) {
    for (auto& e : entries)
        if (e.name == name) return e.t;
    throw ShapeError("unknown parameter: " + std::string(name));
}

const Tensor& Parameters::find(std::string_view name) const {
    for (const auto& e : entries)
        if (e.name == name) return e.t;
    throw ShapeError("unknown parameter: " + std::string(name));
}

size_t Parameters::total_scalars() const {
    size_t n = 0;
    for (const auto& e : entries) n += e.t.size();
    return n;
}

namespace {

Tensor uniform_init(int rows, int cols, int fan_in, Rng& rng) {
    Tensor t(rows, cols);
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-a, a);
    return t;
}

Tensor const_row(int cols, double v) {
    Tensor t(1, cols);
    t.fill(v);
    return t;
}

void add_encoder_params(Parameters& p, const std::string& prefix, uint32_t n_layers,
                        const ModelConfig& cfg, Rng& rng) {
    const int d = static_cast<int>(cfg.d_model);
    const int f = static_cast<int>(cfg.ffn_dim);
    for (uint32_t i = 0; i < n_layers; ++i) {
        const std::string base = prefix + "." + std::to_string(i);
        p.entries.push_back({base + ".ln1.g", const_row(d, 1.0)});
        p.entries.push_back({base + ".ln1.b", const_row(d, 0.0)});
        for (const char* w : {"wq", "wk", "wv", "wo"})
            p.entries.push_back({base + ".attn." + std::string(w), uniform_init(d, d, d, rng)});
        for (const char* b : {"bq", "bk", "bv", "bo"})
            p.entries.push_back({base + ".attn." + std::string(b), const_row(d, 0.0)});
        p.entries.push_back({base + ".ln2.g", const_row(d, 1.0)});
        p.entries.push_back({base + ".ln2.b", const_row(d, 0.0)});
        p.entries.push_back({base + ".ffn.w1", uniform_init(d, f, d, rng)});
        p.entries.push_back({base + ".ffn.b1", const_row(f, 0.0)});
        p.entries.push_back({base + ".ffn.w2", uniform_init(f, d, f, rng)});
        p.entries.push_back({base + ".ffn.b2", const_row(d, 0.0)});
    }
    p.entries.push_back({prefix + ".final_ln.g", const_row(d, 1.0)});
    p.entries.push_back({prefix + ".final_ln.b", const_row(d, 0.0)});
}

}  // namespace

Parameters Parameters::init(const ModelConfig& cfg, uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    const int d = static_cast<int>(cfg.d_model);
    const int k = static_cast<int>(cfg.K);

    Parameters p;
    p.entries.push_back({"embed", uniform_init(static_cast<int>(cfg.vocab), d, d, rng)});
    p.entries.push_back({"pos_local", uniform_init(static_cast<int>(cfg.L), d, d, rng)});
    p.entries.push_back({"pos_chunk", uniform_init(static_cast<int>(cfg.N), d, d, rng)});
    add_encoder_params(p, "local", cfg.n_layers_local, cfg, rng);
    add_encoder_params(p, "global", cfg.n_layers_global, cfg, rng);
    p.entries.push_back({"rec.w1", uniform_init(d, d, d, rng)});
    p.entries.push_back({"rec.b1", const_row(d, 0.0)});
    p.entries.push_back({"rec.w2", uniform_init(d, k, d, rng)});
    p.entries.push_back({"rec.b2", const_row(k, 0.0)});
    const int fused = d + k + 1;
    p.entries.push_back({"head.w1", uniform_init(fused, d, fused, rng)});
    p.entries.push_back({"head.b1", const_row(d, 0.0)});
    p.entries.push_back({"head.w2", uniform_init(d, 1, d, rng)});
    p.entries.push_back({"head.b2", const_row(1, 0.0)});
    return p;
}

ModelGraph::ModelGraph(Tape& tape, const Parameters& params, const ModelConfig& cfg)
    : tape_(tape), params_(params), cfg_(cfg) {
    param_nodes_.reserve(params.entries.size());
    names_.reserve(params.entries.size());
    for (const auto& e : params.entries) {
        param_nodes_.push_back(tape_.leaf(e.t));
        names_.push_back(e.name);
    }
}

Tape::Id ModelGraph::p(std::string_view name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return param_nodes_[i];
    throw ShapeError("unknown parameter: " + std::string(name));
}

Tape::Id ModelGraph::dropout(Tape::Id x, bool training, Rng* rng) {
    if (!training || cfg_.dropout <= 0.0) return x;
    if (!rng) throw NumericError("training-mode dropout needs an rng");
    const Tensor& v = tape_.value(x);
    Tensor mask(v.rows(), v.cols());
    const double keep = 1.0 - cfg_.dropout;
    const double scale = 1.0 / keep;
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = rng->uniform() < keep ? scale : 0.0;
    return tape_.hadamard_const(x, std::move(mask));
}

Tape::Id ModelGraph::encoder_stack(std::string_view prefix, uint32_t n_layers, Tape::Id x,
                                   bool training, Rng* rng, ForwardDebug* debug) {
    const int d = static_cast<int>(cfg_.d_model);
    const int heads = static_cast<int>(cfg_.n_heads);
    const int dh = d / heads;
    const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

    for (uint32_t layer = 0; layer < n_layers; ++layer) {
        const std::string base = std::string(prefix) + "." + std::to_string(layer);
        // pre-norm attention block
        const Tape::Id ln1 = tape_.layernorm(x, p(base + ".ln1.g"), p(base + ".ln1.b"));
        const Tape::Id q = tape_.add_rowvec(tape_.matmul(ln1, p(base + ".attn.wq")),
                                            p(base + ".attn.bq"));
        const Tape::Id k = tape_.add_rowvec(tape_.matmul(ln1, p(base + ".attn.wk")),
                                            p(base + ".attn.bk"));
        const Tape::Id v = tape_.add_rowvec(tape_.matmul(ln1, p(base + ".attn.wv")),
                                            p(base + ".attn.bv"));
        std::vector<Tape::Id> head_ctx;
        head_ctx.reserve(static_cast<size_t>(heads));
        for (int h = 0; h < heads; ++h) {
            const int c0 = h * dh, c1 = (h + 1) * dh;
            const Tape::Id qh = tape_.slice_cols(q, c0, c1);
            const Tape::Id kh = tape_.slice_cols(k, c0, c1);
            const Tape::Id vh = tape_.slice_cols(v, c0, c1);
            const Tape::Id scores = tape_.scale(tape_.matmul_nt(qh, kh), inv_sqrt_dh);
            const Tape::Id probs = tape_.softmax_rows(scores);
            if (debug) debug->attention.push_back(tape_.value(probs));
            head_ctx.push_back(tape_.matmul(probs, vh));
        }
        const Tape::Id ctx = tape_.concat_cols(head_ctx);
        Tape::Id attn_out = tape_.add_rowvec(tape_.matmul(ctx, p(base + ".attn.wo")),
                                             p(base + ".attn.bo"));
        attn_out = dropout(attn_out, training, rng);
        const Tape::Id h1 = tape_.add(x, attn_out);

        // pre-norm feed-forward block
        const Tape::Id ln2 = tape_.layernorm(h1, p(base + ".ln2.g"), p(base + ".ln2.b"));
        const Tape::Id inner = tape_.gelu_op(
            tape_.add_rowvec(tape_.matmul(ln2, p(base + ".ffn.w1")), p(base + ".ffn.b1")));
        Tape::Id ffn_out = tape_.add_rowvec(tape_.matmul(inner, p(base + ".ffn.w2")),
                                            p(base + ".ffn.b2"));
        ffn_out = dropout(ffn_out, training, rng);
        x = tape_.add(h1, ffn_out);
    }
    return tape_.layernorm(x, p(std::string(prefix) + ".final_ln.g"),
                           p(std::string(prefix) + ".final_ln.b"));
}

ForwardNodes ModelGraph::forward(const TokenSequence& t, const FeatureStats& stats, bool training,
                                 Rng* dropout_rng, ForwardDebug* debug) {
    if (t.L != cfg_.L || t.N != cfg_.N) throw ShapeError("token sequence geometry mismatch");
    if (stats.mu.size() != cfg_.K) throw ShapeError("feature stats width mismatch");
    const uint32_t valid = t.valid_segments();
    if (valid == 0) throw EmptyContract("no valid segments");
    // The mask is a valid prefix by construction; enforce it so that padded
    // segments can be skipped outright, which is what makes padding invariance
    // exact rather than approximate.
    for (uint32_t i = 1; i < t.N; ++i)
        if (t.mask[i] > t.mask[i - 1]) throw ShapeError("segment mask must be monotone");

    const Tape::Id embed = p("embed");
    const Tape::Id pos_local = p("pos_local");

    // Local encoder per valid segment; each segment is summarized by the mean
    // of its L encoded positions.
    std::vector<Tape::Id> summaries;
    summaries.reserve(valid);
    for (uint32_t seg = 0; seg < valid; ++seg) {
        std::vector<int> tokens(cfg_.L);
        for (uint32_t i = 0; i < cfg_.L; ++i) {
            const uint16_t tok = t.token(seg, i);
            if (tok >= cfg_.vocab) throw VocabError("token out of range");
            tokens[i] = tok;
        }
        Tape::Id x = tape_.add(tape_.embedding_rows(embed, std::move(tokens)), pos_local);
        x = dropout(x, training, dropout_rng);
        x = encoder_stack("local", cfg_.n_layers_local, x, training, dropout_rng, debug);
        summaries.push_back(tape_.mean_rows(x));
    }

    // Global encoder over the valid segment summaries with chunk positions.
    // Only the valid prefix enters the stack, so padded segments cannot
    // influence any output and their position rows receive no gradient.
    Tape::Id g = valid == 1 ? summaries[0] : tape_.concat_rows(summaries);
    Tape::Id chunk_pos = p("pos_chunk");
    if (valid < cfg_.N) chunk_pos = tape_.slice_rows(chunk_pos, 0, static_cast<int>(valid));
    g = tape_.add(g, chunk_pos);
    g = encoder_stack("global", cfg_.n_layers_global, g, training, dropout_rng, debug);

    // Masked mean pooling over the valid segments (Eq.-style epsilon kept in
    // the denominator even though the prefix is all-ones here).
    std::vector<double> pool_mask(valid, 1.0);
    const Tape::Id v_contract = tape_.masked_mean_rows(g, std::move(pool_mask), 1e-8);

    // Feature reconstruction head.
    const Tape::Id rec_inner = tape_.gelu_op(
        tape_.add_rowvec(tape_.matmul(v_contract, p("rec.w1")), p("rec.b1")));
    const Tape::Id f_hat = tape_.add_rowvec(tape_.matmul(rec_inner, p("rec.w2")), p("rec.b2"));

    // Auxiliary score: the tool's z-score formula applied to the
    // reconstructed features.
    std::vector<double> inv_sigma(cfg_.K);
    for (uint32_t k = 0; k < cfg_.K; ++k) inv_sigma[k] = 1.0 / stats.sigma[k];
    const Tape::Id s_tool_hat = tape_.zscore_sum(f_hat, stats.mu, std::move(inv_sigma));

    // Fusion head over [v_contract ⊕ f_hat ⊕ s_tool_hat].
    const std::array<Tape::Id, 3> fused_parts = {v_contract, f_hat, s_tool_hat};
    const Tape::Id fused = tape_.concat_cols(fused_parts);
    const Tape::Id head_inner = tape_.gelu_op(
        tape_.add_rowvec(tape_.matmul(fused, p("head.w1")), p("head.b1")));
    const Tape::Id s_hat = tape_.add_rowvec(tape_.matmul(head_inner, p("head.w2")), p("head.b2"));

    ForwardNodes out;
    out.s_hat = s_hat;
    out.s_tool_hat = s_tool_hat;
    out.f_hat = f_hat;
    out.v_contract = v_contract;
    return out;
}

ForwardOutput forward(const TokenSequence& t, const Parameters& params, const FeatureStats& stats,
                      const ModelConfig& cfg, ForwardDebug* debug) {
    Tape tape(/*recording=*/false);
    ModelGraph graph(tape, params, cfg);
    const ForwardNodes nodes = graph.forward(t, stats, /*training=*/false, nullptr, debug);
    ForwardOutput out;
    out.s_hat = tape.value(nodes.s_hat)[0];
    out.s_tool_hat = tape.value(nodes.s_tool_hat)[0];
    const Tensor& f = tape.value(nodes.f_hat);
    out.f_hat.assign(f.data(), f.data() + f.size());
    const Tensor& v = tape.value(nodes.v_contract);
    out.v_contract.assign(v.data(), v.data() + v.size());
    return out;
}

Tape::Id example_loss(Tape& tape, const ForwardNodes& nodes, double s_tool,
                      std::span<const double> features, const ModelConfig& cfg, size_t batch_size,
                      LossTerms* accumulate) {
    if (!std::isfinite(s_tool)) throw NumericError("non-finite score target");
    for (double f : features)
        if (!std::isfinite(f)) throw NumericError("non-finite feature target");
    if (features.size() != cfg.K) throw ShapeError("feature target width mismatch");
    if (batch_size == 0) throw ShapeError("batch size must be positive");

    const double inv_b = 1.0 / static_cast<double>(batch_size);
    const Tape::Id target_s = tape.constant(Tensor::scalar(s_tool));
    Tensor target_f(1, static_cast<int>(cfg.K));
    for (uint32_t k = 0; k < cfg.K; ++k) target_f[k] = features[k];

    const Tape::Id err_s = tape.sq_sum(tape.sub(nodes.s_hat, target_s));
    const Tape::Id err_aux = tape.sq_sum(tape.sub(nodes.s_tool_hat, target_s));
    const Tape::Id err_f = tape.sq_sum(tape.sub(nodes.f_hat, tape.constant(std::move(target_f))));

    const Tape::Id w_s = tape.scale(err_s, cfg.lambda_s * inv_b);
    const Tape::Id w_aux = tape.scale(err_aux, cfg.lambda_aux * inv_b);
    const Tape::Id w_f = tape.scale(err_f, cfg.lambda_feature * inv_b);
    const Tape::Id total = tape.add(tape.add(w_s, w_aux), w_f);

    if (!std::isfinite(tape.value(total)[0])) throw NumericError("non-finite loss");
    if (accumulate) {
        accumulate->term_s += tape.value(w_s)[0];
        accumulate->term_aux += tape.value(w_aux)[0];
        accumulate->term_feature += tape.value(w_f)[0];
        accumulate->total = accumulate->term_s + accumulate->term_aux + accumulate->term_feature;
    }
    return total;
}

}  // namespace obfscore
