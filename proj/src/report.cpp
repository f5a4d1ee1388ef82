#include "rwre/report.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace rwre {

using nlohmann::ordered_json;

bool ExperimentReport::all_pass() const {
    for (const auto& v : verdicts)
        if (!v.pass) return false;
    return true;
}

void ExperimentReport::add_scalar(std::string name, double value) {
    scalars.emplace_back(std::move(name), value);
}

Verdict& ExperimentReport::add_verdict(std::string criterion, std::string comparison,
                                       double threshold, double observed, bool pass) {
    verdicts.push_back({std::move(criterion), std::move(comparison), threshold, observed, pass});
    return verdicts.back();
}

std::string format_double(double v) {
    std::array<char, 64> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), p);
}

// ---------------------------------------------------------------------------
// Compact SHA-256 (FIPS 180-4); used for artifact manifests only.

namespace {

constexpr std::array<uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

void sha256_block(std::array<uint32_t, 8>& h, const unsigned char* p) {
    uint32_t w[64];
    for (int i = 0; i < 16; ++i)
        w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
               (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
        const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
        const uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        const uint32_t ch = (e & f) ^ (~e & g);
        const uint32_t t1 = hh + S1 + ch + kSha256K[static_cast<size_t>(i)] + w[i];
        const uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        const uint32_t t2 = S0 + maj;
        hh = g; g = f; f = e; e = d + t1;
        d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d;
    h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
}

} // namespace

std::string sha256_hex(std::string_view data) {
    std::array<uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                 0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    size_t n = data.size();
    while (n >= 64) {
        sha256_block(h, p);
        p += 64;
        n -= 64;
    }
    unsigned char tail[128] = {0};
    std::memcpy(tail, p, n);
    tail[n] = 0x80;
    const size_t blocks = n + 9 <= 64 ? 1 : 2;
    const uint64_t bits = static_cast<uint64_t>(data.size()) * 8;
    for (int i = 0; i < 8; ++i)
        tail[blocks * 64 - 1 - static_cast<size_t>(i)] =
            static_cast<unsigned char>(bits >> (8 * i));
    sha256_block(h, tail);
    if (blocks == 2) sha256_block(h, tail + 64);

    static const char* hex = "0123456789abcdef";
    std::string out(64, '0');
    for (int i = 0; i < 8; ++i)
        for (int b = 0; b < 4; ++b) {
            const unsigned char byte = static_cast<unsigned char>(h[static_cast<size_t>(i)] >>
                                                                  (8 * (3 - b)));
            out[static_cast<size_t>(8 * i + 2 * b)] = hex[byte >> 4];
            out[static_cast<size_t>(8 * i + 2 * b + 1)] = hex[byte & 0xf];
        }
    return out;
}

ordered_json report_to_json(const ExperimentReport& report) {
    ordered_json j;
    j["schema"] = kReportSchema;
    j["study"] = report.study;
    j["code_version"] = kCodeVersion;
    j["config"] = report.config;
    j["config_hash"] = sha256_hex(report.config.dump());
    ordered_json scalars = ordered_json::object();
    for (const auto& [k, v] : report.scalars) scalars[k] = v;
    j["scalars"] = scalars;
    ordered_json verdicts = ordered_json::array();
    for (const auto& v : report.verdicts) {
        ordered_json jv;
        jv["criterion"] = v.criterion;
        jv["comparison"] = v.comparison;
        jv["threshold"] = v.threshold;
        jv["observed"] = v.observed;
        jv["pass"] = v.pass;
        verdicts.push_back(jv);
    }
    j["verdicts"] = verdicts;
    ordered_json series_names = ordered_json::array();
    for (const auto& s : report.series) series_names.push_back(s.name);
    j["series"] = series_names;
    j["all_pass"] = report.all_pass();
    return j;
}

std::vector<WrittenFile> write_report(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::vector<WrittenFile> files;
    auto emit = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + name + " under " + dir);
        out << content;
        files.push_back({name, sha256_hex(content)});
    };

    emit("report.json", report_to_json(report).dump(2) + "\n");

    for (const auto& s : report.series) {
        std::string csv = s.x_label + "," + s.y_label + "\n";
        for (size_t i = 0; i < s.xs.size(); ++i)
            csv += format_double(s.xs[i]) + "," + format_double(s.ys[i]) + "\n";
        emit(s.name + ".csv", csv);
    }

    ordered_json manifest;
    manifest["schema"] = kReportSchema;
    manifest["study"] = report.study;
    manifest["code_version"] = kCodeVersion;
    manifest["config_hash"] = sha256_hex(report.config.dump());
    ordered_json jf = ordered_json::array();
    for (const auto& f : files) {
        ordered_json e;
        e["path"] = f.path;
        e["sha256"] = f.sha256;
        jf.push_back(e);
    }
    manifest["files"] = jf;
    const std::string ms = manifest.dump(2) + "\n";
    {
        std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
        out << ms;
    }
    files.push_back({"manifest.json", sha256_hex(ms)});
    return files;
}

} // namespace rwre
