#include "obfscore/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "obfscore/errors.hpp"
#include "obfscore/keccak.hpp"

namespace obfscore {

using nlohmann::json;

namespace {

json config_to_json_obj(const ModelConfig& c) {
    return json{{"L", c.L},
                {"N", c.N},
                {"vocab", c.vocab},
                {"d_model", c.d_model},
                {"n_layers_local", c.n_layers_local},
                {"n_layers_global", c.n_layers_global},
                {"n_heads", c.n_heads},
                {"ffn_dim", c.ffn_dim},
                {"dropout", c.dropout},
                {"K", c.K},
                {"lambda_s", c.lambda_s},
                {"lambda_aux", c.lambda_aux},
                {"lambda_feature", c.lambda_feature},
                {"lr", c.lr},
                {"weight_decay", c.weight_decay},
                {"clip_norm", c.clip_norm},
                {"batch", c.batch},
                {"epochs", c.epochs},
                {"seed", c.seed}};
}

ModelConfig config_from_json_obj(const json& j) {
    ModelConfig c;
    c.L = j.at("L");
    c.N = j.at("N");
    c.vocab = j.at("vocab");
    c.d_model = j.at("d_model");
    c.n_layers_local = j.at("n_layers_local");
    c.n_layers_global = j.at("n_layers_global");
    c.n_heads = j.at("n_heads");
    c.ffn_dim = j.at("ffn_dim");
    c.dropout = j.at("dropout");
    c.K = j.at("K");
    c.lambda_s = j.at("lambda_s");
    c.lambda_aux = j.at("lambda_aux");
    c.lambda_feature = j.at("lambda_feature");
    c.lr = j.at("lr");
    c.weight_decay = j.at("weight_decay");
    c.clip_norm = j.at("clip_norm");
    c.batch = j.at("batch");
    c.epochs = j.at("epochs");
    c.seed = j.at("seed");
    c.validate();
    return c;
}

}  // namespace

std::string config_to_json(const ModelConfig& cfg) { return config_to_json_obj(cfg).dump(); }

ModelConfig config_from_json(const std::string& json_text) {
    return config_from_json_obj(json::parse(json_text));
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    json j;
    j["version"] = ckpt.version;
    j["hash_algorithm"] = ckpt.hash_algorithm.empty() ? kHashAlgorithm : ckpt.hash_algorithm;
    j["config"] = config_to_json_obj(ckpt.config);
    j["stats"] = json{{"mu", ckpt.stats.mu}, {"sigma", ckpt.stats.sigma}};
    json params = json::array();
    for (const auto& e : ckpt.params.entries) {
        std::vector<double> data(e.t.data(), e.t.data() + e.t.size());
        params.push_back(json{{"name", e.name},
                              {"rows", e.t.rows()},
                              {"cols", e.t.cols()},
                              {"data", std::move(data)}});
    }
    j["params"] = std::move(params);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint: " + path.string());
    out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoint: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("malformed checkpoint " + path.string() + ": " + e.what());
    }

    Checkpoint ckpt;
    ckpt.version = j.at("version");
    ckpt.hash_algorithm = j.at("hash_algorithm");
    ckpt.config = config_from_json_obj(j.at("config"));
    ckpt.stats.mu = j.at("stats").at("mu").get<std::vector<double>>();
    ckpt.stats.sigma = j.at("stats").at("sigma").get<std::vector<double>>();
    for (const auto& pj : j.at("params")) {
        Parameters::Entry e;
        e.name = pj.at("name");
        e.t.resize(pj.at("rows"), pj.at("cols"));
        const auto data = pj.at("data").get<std::vector<double>>();
        if (data.size() != e.t.size()) throw IoError("checkpoint tensor size mismatch: " + e.name);
        std::copy(data.begin(), data.end(), e.t.data());
        ckpt.params.entries.push_back(std::move(e));
    }
    return ckpt;
}

}  // namespace obfscore
