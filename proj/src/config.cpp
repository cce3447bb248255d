#include "fairalloc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fairalloc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
    throw std::invalid_argument(origin + ": " + message);
}

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& origin, const std::string& scope) {
    for (const auto& [key, value] : object.items()) {
        (void)value;
        if (!known.contains(key)) fail(origin, "unknown key '" + scope + key + "'");
    }
}

Money parse_probe(const json& value, const std::string& origin) {
    if (value.is_string()) return parse_money(value.get<std::string>());
    if (value.is_number_integer()) {
        const std::int64_t units = value.get<std::int64_t>();
        if (units < 0) fail(origin, "four.probe must be non-negative");
        return units * kMinorPerUnit;
    }
    fail(origin, "four.probe must be a decimal string or whole currency units");
}

}  // namespace

ResidualPolicy RunConfig::make_policy() const {
    if (policy == "largest_account") return ResidualPolicy::largest_account();
    if (policy == "rotation") return ResidualPolicy::rotation(rotation_cycle);
    if (policy == "random") return ResidualPolicy::random(seed);
    throw std::invalid_argument("unknown residual policy '" + policy + "'");
}

RunConfig parse_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(origin, std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail(origin, "top level must be an object");
    reject_unknown_keys(root, {"method", "policy", "rotation_cycle", "seed", "four"}, origin, "");

    RunConfig config;
    if (root.contains("method")) {
        config.method = root["method"].get<std::string>();
        static const std::set<std::string> methods{"simple", "hpha", "aps", "four"};
        if (!methods.contains(config.method)) fail(origin, "unknown method '" + config.method + "'");
    }
    if (root.contains("policy")) {
        config.policy = root["policy"].get<std::string>();
        static const std::set<std::string> policies{"largest_account", "rotation", "random"};
        if (!policies.contains(config.policy)) fail(origin, "unknown policy '" + config.policy + "'");
    }
    if (root.contains("rotation_cycle")) {
        config.rotation_cycle = root["rotation_cycle"].get<int>();
        if (config.rotation_cycle < 0) fail(origin, "rotation_cycle must be non-negative");
    }
    if (root.contains("seed")) config.seed = root["seed"].get<std::uint64_t>();

    if (root.contains("four")) {
        const json& four = root["four"];
        if (!four.is_object()) fail(origin, "'four' must be an object");
        reject_unknown_keys(four, {"k", "mode", "probe", "nmax", "weights"}, origin, "four.");
        if (four.contains("k")) {
            config.four.search.k = four["k"].get<int>();
            if (config.four.search.k < 0) fail(origin, "four.k must be non-negative");
        }
        if (four.contains("mode")) {
            const std::string mode = four["mode"].get<std::string>();
            if (mode == "proportional")
                config.four.search.mode = SearchMode::Proportional;
            else if (mode == "corrective")
                config.four.search.mode = SearchMode::Corrective;
            else
                fail(origin, "unknown four.mode '" + mode + "'");
        }
        if (four.contains("probe")) config.four.search.probe = parse_probe(four["probe"], origin);
        if (four.contains("nmax")) {
            const std::int64_t nmax = four["nmax"].get<std::int64_t>();
            if (nmax < 1) fail(origin, "four.nmax must be at least 1");
            config.four.search.nmax = static_cast<std::size_t>(nmax);
        }
        if (four.contains("weights")) {
            const json& weights = four["weights"];
            if (!weights.is_object()) fail(origin, "'four.weights' must be an object");
            reject_unknown_keys(weights, {"enabled", "frequency"}, origin, "four.weights.");
            if (weights.contains("enabled"))
                config.four.weights_enabled = weights["enabled"].get<bool>();
            if (weights.contains("frequency")) {
                const std::string freq = weights["frequency"].get<std::string>();
                if (freq == "per_fill")
                    config.four.weight_frequency = WeightFrequency::PerFill;
                else if (freq == "weekly")
                    config.four.weight_frequency = WeightFrequency::Weekly;
                else if (freq == "monthly")
                    config.four.weight_frequency = WeightFrequency::Monthly;
                else if (freq == "quarterly")
                    config.four.weight_frequency = WeightFrequency::Quarterly;
                else
                    fail(origin, "unknown four.weights.frequency '" + freq + "'");
            }
        }
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(path + ": cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

}  // namespace fairalloc
