#pragma once
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwre/environment.hpp"

namespace rwre {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(std::vector<std::string> issues_)
        : std::runtime_error(join(issues_)), issues(std::move(issues_)) {}
    std::vector<std::string> issues;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid configuration:";
        for (const auto& e : v) s += "\n  - " + e;
        return s;
    }
};

// Run-wide configuration. JSON file keys mirror the field names; flags
// override file values; unknown keys are rejected.
struct GlobalConfig {
    EnvironmentSpec env;
    double k0 = 5.0;
    uint64_t master_seed = 1;
    std::string out_dir;
    std::string format = "csv";  // csv | json
    int verbosity = 1;
};

// Validating parse; collects every error instead of stopping at the first.
GlobalConfig config_from_json(const nlohmann::ordered_json& j);
GlobalConfig parse_config_file(const std::string& path);

nlohmann::ordered_json config_to_json(const GlobalConfig& cfg);

} // namespace rwre
