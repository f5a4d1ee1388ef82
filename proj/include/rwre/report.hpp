#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rwre {

inline constexpr const char* kCodeVersion = "rwre 0.1.0";
inline constexpr const char* kReportSchema = "v1";

struct Verdict {
    std::string criterion;   // named criterion this verdict decides
    std::string comparison;  // human-readable relation, e.g. "median_f2 >= 0.95"
    double threshold = 0.0;
    double observed = 0.0;
    bool pass = false;
};

struct Series {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct ExperimentReport {
    std::string study;
    nlohmann::ordered_json config;  // exact configuration incl. thresholds and seeds
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<Series> series;
    std::vector<Verdict> verdicts;

    bool all_pass() const;
    void add_scalar(std::string name, double value);
    Verdict& add_verdict(std::string criterion, std::string comparison, double threshold,
                         double observed, bool pass);
};

// shortest round-trip decimal form
std::string format_double(double v);

std::string sha256_hex(std::string_view data);

nlohmann::ordered_json report_to_json(const ExperimentReport& report);

struct WrittenFile {
    std::string path;  // relative to the output dir
    std::string sha256;
};

// Writes report.json, one CSV per series, and manifest.json (schema version,
// config hash, file hashes). Rewriting the same report yields byte-identical
// files. Returns the manifest entries.
std::vector<WrittenFile> write_report(const ExperimentReport& report,
                                      const std::string& dir);

} // namespace rwre
