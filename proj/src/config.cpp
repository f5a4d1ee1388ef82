#include "rwre/config.hpp"

#include <fstream>
#include <set>

namespace rwre {

using nlohmann::ordered_json;

GlobalConfig config_from_json(const ordered_json& j) {
    GlobalConfig cfg;
    std::vector<std::string> errors;

    static const std::set<std::string> known = {"family", "a",      "delta",     "seed",
                                                "k0",     "master_seed", "out",  "format",
                                                "verbosity", "length_hint"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) errors.push_back("unknown key: " + it.key());
    }

    auto number_field = [&](const char* key, double lo, double hi, double dflt,
                            bool required = false) {
        if (!j.contains(key)) {
            if (required) errors.push_back(std::string(key) + ": missing");
            return dflt;
        }
        if (!j[key].is_number()) {
            errors.push_back(std::string(key) + ": must be a number");
            return dflt;
        }
        const double v = j[key].get<double>();
        if (v < lo || v > hi) {
            errors.push_back(std::string(key) + ": out of range [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "], got " + std::to_string(v));
            return dflt;
        }
        return v;
    };

    if (j.contains("family")) {
        if (!j["family"].is_string()) {
            errors.push_back("family: must be a string");
        } else {
            const std::string f = j["family"].get<std::string>();
            if (f == "twopoint")
                cfg.env.family = EnvFamily::TwoPoint;
            else if (f == "uniform")
                cfg.env.family = EnvFamily::UniformSymmetric;
            else
                errors.push_back("family: must be \"twopoint\" or \"uniform\", got \"" + f + "\"");
        }
    }
    cfg.env.a = number_field("a", 1e-12, 1e6, cfg.env.a);
    if (j.contains("a") && j["a"].is_number() && j["a"].get<double>() <= 0.0)
        errors.push_back("a: must be positive");
    cfg.env.delta = number_field("delta", 1e-12, 0.5, cfg.env.delta);
    if (j.contains("delta") && j["delta"].is_number()) {
        const double d = j["delta"].get<double>();
        if (!(d > 0.0 && d < 0.5)) errors.push_back("delta: must lie in (0, 1/2)");
    }
    auto uint_field = [&](const char* key, auto& target) {
        if (!j.contains(key)) return;
        if (j[key].is_number_unsigned())
            target = j[key].get<uint64_t>();
        else if (j[key].is_number_integer() && j[key].get<int64_t>() >= 0)
            target = static_cast<uint64_t>(j[key].get<int64_t>());
        else
            errors.push_back(std::string(key) + ": must be a nonnegative integer");
    };
    uint_field("seed", cfg.env.seed);
    uint64_t length_hint = 0;
    uint_field("length_hint", length_hint);
    cfg.env.length_hint = static_cast<int64_t>(length_hint);
    cfg.k0 = number_field("k0", 1e-12, 1e6, cfg.k0);
    if (j.contains("k0") && j["k0"].is_number() && j["k0"].get<double>() <= 0.0)
        errors.push_back("k0: must be positive");
    uint_field("master_seed", cfg.master_seed);
    if (j.contains("out")) {
        if (!j["out"].is_string())
            errors.push_back("out: must be a string");
        else
            cfg.out_dir = j["out"].get<std::string>();
    }
    if (j.contains("format")) {
        if (!j["format"].is_string())
            errors.push_back("format: must be a string");
        else {
            cfg.format = j["format"].get<std::string>();
            if (cfg.format != "csv" && cfg.format != "json")
                errors.push_back("format: must be \"csv\" or \"json\"");
        }
    }
    if (j.contains("verbosity")) {
        if (!j["verbosity"].is_number_integer())
            errors.push_back("verbosity: must be an integer");
        else
            cfg.verbosity = j["verbosity"].get<int>();
    }

    if (!errors.empty()) throw ValidationError(std::move(errors));
    return cfg;
}

GlobalConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

nlohmann::ordered_json config_to_json(const GlobalConfig& cfg) {
    ordered_json j;
    j["family"] = cfg.env.family == EnvFamily::TwoPoint ? "twopoint" : "uniform";
    if (cfg.env.family == EnvFamily::TwoPoint)
        j["a"] = cfg.env.a;
    else
        j["delta"] = cfg.env.delta;
    j["seed"] = cfg.env.seed;
    if (cfg.env.length_hint > 0) j["length_hint"] = cfg.env.length_hint;
    j["k0"] = cfg.k0;
    j["master_seed"] = cfg.master_seed;
    if (!cfg.out_dir.empty()) j["out"] = cfg.out_dir;
    j["format"] = cfg.format;
    j["verbosity"] = cfg.verbosity;
    return j;
}

} // namespace rwre
