#include "strata/config.hpp"

#include <set>

#include "strata/persistence.hpp"

namespace strata {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
    std::set<std::string> keys(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!keys.contains(it.key())) throw Error(ErrorCode::InvalidConfig, "unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

}  // namespace

void LabelConfig::validate() const {
    if (m < 1) throw Error(ErrorCode::InvalidConfig, "labels.m must be at least 1");
    if (external.sample_size < 1) throw Error(ErrorCode::InvalidConfig, "labels.sample_size must be at least 1");
    if (external.max_label_chars < 1) throw Error(ErrorCode::InvalidConfig, "labels.max_label_chars must be at least 1");
    if (client != "mock" && client != "http") throw Error(ErrorCode::InvalidConfig, "labels.client must be mock or http");
}

void RunConfig::validate() const {
    timestep.validate();
    physics.validate();
    clustering.validate();
    labels.validate();
    if (!(threshold_constant > 1.0)) throw Error(ErrorCode::InvalidConfig, "threshold constant C must exceed 1");
    if (!(z_spacing > 0.0)) throw Error(ErrorCode::InvalidConfig, "z_spacing must be positive");
    if (relax.max_iters < 0) throw Error(ErrorCode::InvalidConfig, "relax.max_iters must be non-negative");
    if (!(relax.tol >= 0.0)) throw Error(ErrorCode::InvalidConfig, "relax.tol must be non-negative");
}

RunConfig run_config_from_json(const json& j, RunConfig cfg) {
    try {
        reject_unknown(j, {"timestep", "origin", "seed", "z_spacing", "physics", "threshold", "clustering", "labels", "relax"},
                       "run config");
        if (auto it = j.find("timestep"); it != j.end()) {
            const auto origin = cfg.timestep.origin;
            cfg.timestep = parse_timestep(it->get<std::string>());
            cfg.timestep.origin = origin;
        }
        if (auto it = j.find("origin"); it != j.end() && !it->is_null()) {
            const auto text = it->get<std::string>();
            cfg.timestep.origin = parse_iso8601(text);
            if (!cfg.timestep.origin) throw Error(ErrorCode::InvalidConfig, "origin '" + text + "' is not ISO-8601");
        }
        read(j, "seed", cfg.seed);
        read(j, "z_spacing", cfg.z_spacing);
        if (auto it = j.find("physics"); it != j.end()) {
            reject_unknown(*it, {"dt", "damping", "beta", "repulsion_strength", "repulsion_floor", "max_speed",
                                 "base_mass", "threads"},
                           "physics");
            read(*it, "dt", cfg.physics.dt);
            read(*it, "damping", cfg.physics.damping);
            read(*it, "beta", cfg.physics.beta);
            read(*it, "repulsion_strength", cfg.physics.repulsion_strength);
            read(*it, "repulsion_floor", cfg.physics.repulsion_floor);
            read(*it, "max_speed", cfg.physics.max_speed);
            read(*it, "base_mass", cfg.physics.base_mass);
            read(*it, "threads", cfg.physics.threads);
        }
        if (auto it = j.find("threshold"); it != j.end()) {
            reject_unknown(*it, {"policy", "c"}, "threshold");
            if (auto p = it->find("policy"); p != it->end()) {
                const auto name = p->get<std::string>();
                if (name == "dynamic") cfg.threshold_policy = ThresholdPolicy::Dynamic;
                else if (name == "all_attractive") cfg.threshold_policy = ThresholdPolicy::AllAttractive;
                else throw Error(ErrorCode::InvalidConfig, "threshold.policy must be dynamic or all_attractive");
            }
            read(*it, "c", cfg.threshold_constant);
        }
        if (auto it = j.find("clustering"); it != j.end()) {
            reject_unknown(*it, {"min_cluster_size", "min_samples", "min_shared_members"}, "clustering");
            read(*it, "min_cluster_size", cfg.clustering.min_cluster_size);
            read(*it, "min_samples", cfg.clustering.min_samples);
            read(*it, "min_shared_members", cfg.clustering.min_shared_members);
        }
        if (auto it = j.find("labels"); it != j.end()) {
            reject_unknown(*it, {"source", "m", "sample_size", "max_label_chars", "client", "endpoint", "model",
                                 "api_key_env", "timeout_ms"},
                           "labels");
            if (auto s = it->find("source"); s != it->end()) {
                const auto name = s->get<std::string>();
                if (name == "tfidf") cfg.labels.mode = LabelMode::TfIdf;
                else if (name == "external") cfg.labels.mode = LabelMode::External;
                else throw Error(ErrorCode::InvalidConfig, "labels.source must be tfidf or external");
            }
            read(*it, "m", cfg.labels.m);
            read(*it, "sample_size", cfg.labels.external.sample_size);
            read(*it, "max_label_chars", cfg.labels.external.max_label_chars);
            read(*it, "client", cfg.labels.client);
            read(*it, "endpoint", cfg.labels.http.endpoint);
            read(*it, "model", cfg.labels.http.model);
            read(*it, "api_key_env", cfg.labels.http.api_key_env);
            if (auto t = it->find("timeout_ms"); t != it->end())
                cfg.labels.http.timeout = std::chrono::milliseconds{t->get<long long>()};
        }
        if (auto it = j.find("relax"); it != j.end()) {
            reject_unknown(*it, {"max_iters", "tol"}, "relax");
            read(*it, "max_iters", cfg.relax.max_iters);
            read(*it, "tol", cfg.relax.tol);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    cfg.physics.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
    json j;
    j["timestep"] = format_timestep(cfg.timestep);
    j["origin"] = cfg.timestep.origin ? json(format_iso8601(*cfg.timestep.origin)) : json(nullptr);
    j["seed"] = cfg.seed;
    j["z_spacing"] = cfg.z_spacing;
    j["physics"] = {{"dt", cfg.physics.dt},
                    {"damping", cfg.physics.damping},
                    {"beta", cfg.physics.beta},
                    {"repulsion_strength", cfg.physics.repulsion_strength},
                    {"repulsion_floor", cfg.physics.repulsion_floor},
                    {"max_speed", cfg.physics.max_speed},
                    {"base_mass", cfg.physics.base_mass},
                    {"threads", cfg.physics.threads}};
    j["threshold"] = {{"policy", cfg.threshold_policy == ThresholdPolicy::Dynamic ? "dynamic" : "all_attractive"},
                      {"c", cfg.threshold_constant}};
    j["clustering"] = {{"min_cluster_size", cfg.clustering.min_cluster_size},
                       {"min_samples", cfg.clustering.min_samples},
                       {"min_shared_members", cfg.clustering.min_shared_members}};
    j["labels"] = {{"source", cfg.labels.mode == LabelMode::TfIdf ? "tfidf" : "external"},
                   {"m", cfg.labels.m},
                   {"sample_size", cfg.labels.external.sample_size},
                   {"max_label_chars", cfg.labels.external.max_label_chars},
                   {"client", cfg.labels.client},
                   {"endpoint", cfg.labels.http.endpoint},
                   {"model", cfg.labels.http.model},
                   {"api_key_env", cfg.labels.http.api_key_env},
                   {"timeout_ms", cfg.labels.http.timeout.count()}};
    j["relax"] = {{"max_iters", cfg.relax.max_iters}, {"tol", cfg.relax.tol}};
    return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    return run_config_from_json(j);
}

std::shared_ptr<LabelClient> make_label_client(const LabelConfig& cfg) {
    if (cfg.mode != LabelMode::External) return nullptr;
    if (cfg.client == "http") return std::make_shared<HttpLabelClient>(cfg.http);
    return std::make_shared<MockLabelClient>();
}

}  // namespace strata
