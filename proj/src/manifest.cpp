#include "dsc/manifest.hpp"

#include "dsc/workload.hpp"
#include "json.hpp"

namespace dsc {

namespace {

template <typename T>
void put_opt(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
}

template <typename T>
std::optional<T> get_opt(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    put_opt(j, "network", m.network);
    put_opt(j, "weights", m.weights);
    put_opt(j, "input", m.input);
    j["out_dir"] = m.out_dir;
    j["seed"] = m.seed;
    j["mode"] = m.mode;
    j["freq_hz"] = m.freq_hz;
    j["spatial_cap"] = m.spatial_cap;
    put_opt(j, "convention", m.convention);
    j["crosscheck"] = m.crosscheck;
    j["layers"] = m.layers;
    j["trials"] = m.trials;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.network = get_opt<std::string>(j, "network");
        m.weights = get_opt<std::string>(j, "weights");
        m.input = get_opt<std::string>(j, "input");
        m.out_dir = j.at("out_dir").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.mode = j.at("mode").get<std::string>();
        m.freq_hz = j.at("freq_hz").get<double>();
        m.spatial_cap = j.at("spatial_cap").get<int>();
        m.convention = get_opt<std::string>(j, "convention");
        m.crosscheck = j.at("crosscheck").get<bool>();
        m.layers = j.at("layers").get<std::vector<int>>();
        m.trials = j.at("trials").get<int>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
}

}  // namespace dsc
