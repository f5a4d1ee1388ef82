#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwre/chain_analytics.hpp"
#include "rwre/config.hpp"
#include "rwre/environment.hpp"
#include "rwre/experiments.hpp"
#include "rwre/report.hpp"
#include "rwre/simulator.hpp"
#include "rwre/valleys.hpp"

using namespace rwre;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitUsage = 2;

// stdout plus optional --out directory with a manifest of written files
struct OutputSink {
    std::string dir;
    ordered_json config_used;
    std::vector<WrittenFile> files;

    void emit(const std::string& name, const std::string& content, bool to_stdout = true) {
        if (to_stdout) std::cout << content;
        if (dir.empty()) return;
        std::filesystem::create_directories(dir);
        std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
        f << content;
        files.push_back({name, sha256_hex(content)});
    }

    void finish() {
        if (dir.empty() || files.empty()) return;
        ordered_json manifest;
        manifest["schema"] = kReportSchema;
        manifest["code_version"] = kCodeVersion;
        manifest["config_hash"] = sha256_hex(config_used.dump());
        manifest["config"] = config_used;
        ordered_json jf = ordered_json::array();
        for (const auto& f : files) {
            ordered_json e;
            e["path"] = f.path;
            e["sha256"] = f.sha256;
            jf.push_back(e);
        }
        manifest["files"] = jf;
        std::ofstream f(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
        f << manifest.dump(2) << "\n";
    }
};

std::string csv_int(int64_t v) { return std::to_string(v); }

std::string csv_opt(double v) {
    return std::isnan(v) ? std::string() : format_double(v);
}

int run_env_dump(const GlobalConfig& cfg, int64_t dump_to, OutputSink& sink) {
    Environment env(cfg.env);
    std::string csv = "x,omega,log_rho,V\n";
    for (int64_t x = 0; x <= dump_to; ++x) {
        csv += csv_int(x) + ",";
        if (x >= 1) {
            csv += format_double(env.omega_at(x)) + "," + format_double(env.log_rho(x));
        } else {
            csv += ",";  // site 0 is governed by the reflection rule, not omega
        }
        csv += "," + format_double(env.potential(x)) + "\n";
    }
    sink.emit("env.csv", csv);
    return kExitOk;
}

int run_valleys(const GlobalConfig& cfg, int64_t horizon, OutputSink& sink) {
    Environment env(cfg.env);
    ValleyDecomposition dec = decompose(env, cfg.k0, horizon);
    std::string csv = "k,m,theta,b,eta,h_minus,h_plus,h,lambda,complete\n";
    for (const auto& v : dec.valleys) {
        csv += csv_int(v.k) + "," + csv_int(v.start) + "," + csv_int(v.theta) + "," +
               csv_int(v.bottom) + "," + csv_int(v.eta) + "," + csv_opt(v.h_minus) + "," +
               csv_opt(v.h_plus) + "," + csv_opt(v.h) + "," + csv_opt(v.lambda) + "," +
               (v.complete ? "1" : "0") + "\n";
    }
    sink.emit("valleys.csv", csv);
    return kExitOk;
}

int run_exact(const GlobalConfig& cfg, const std::string& what, int64_t b, int64_t x,
              int64_t i, int64_t left, int64_t right, int64_t start,
              const std::string& mode, OutputSink& sink) {
    Environment env(cfg.env);
    ordered_json out;
    ordered_json inputs;
    if (what == "hitprob") {
        inputs = {{"b", b}, {"x", x}, {"i", i}};
        const double value = hit_before_prob(env, b, x, i);
        OracleResult orc = solve_finite_chain(env, b, i, OracleMode::HitProbs);
        const double oracle = orc.absorb_left[static_cast<size_t>(x - b)];
        out = {{"inputs", inputs},
               {"value", value},
               {"oracle_value", oracle},
               {"rel_err", std::abs(value - oracle) / std::max(value, oracle)}};
    } else if (what == "visits") {
        inputs = {{"b", b}, {"x", x}};
        ExcursionLawParams p = excursion_visit_params(env, b, x);
        out = {{"inputs", inputs},
               {"value", excursion_visit_mean(env, b, x)},
               {"alpha", p.alpha},
               {"beta", p.beta},
               {"variance", excursion_visit_variance(env, b, x)}};
    } else if (what == "golosov") {
        inputs = {{"x", x}};
        out = {{"inputs", inputs},
               {"value", golosov_bound(env, x)},
               {"log_value", golosov_bound_log(env, x)}};
    } else if (what == "escape") {
        inputs = {{"b", b}, {"i", i}};
        out = {{"inputs", inputs}, {"value", escape_parameter(env, b, i)}};
    } else if (what == "oracle") {
        inputs = {{"left", left}, {"right", right}, {"mode", mode}, {"start", start}};
        if (mode == "hit") {
            OracleResult orc = solve_finite_chain(env, left, right, OracleMode::HitProbs);
            out = {{"inputs", inputs},
                   {"value", orc.absorb_right[static_cast<size_t>(start - left)]},
                   {"residual", orc.residual}};
        } else {
            OracleResult orc =
                solve_finite_chain(env, left, right, OracleMode::OccupationBefore, start);
            out = {{"inputs", inputs},
                   {"value", orc.expected_total},
                   {"residual", orc.residual}};
        }
    } else {
        throw CLI::ValidationError("exact", "unknown quantity: " + what);
    }
    sink.emit("exact.json", out.dump(2) + "\n");
    return kExitOk;
}

int run_simulate(const GlobalConfig& cfg, uint64_t walk_seed, uint64_t steps,
                 const std::vector<int64_t>& hits, OutputSink& sink) {
    Environment env(cfg.env);
    WalkConfig wc;
    wc.walk_seed = walk_seed;
    wc.n_steps = steps;
    wc.step_cap = std::max<uint64_t>(steps, wc.step_cap);
    wc.hitting_targets = hits;
    const auto t0 = std::chrono::steady_clock::now();
    TrajectorySummary sum = run_walk(env, wc);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
    ValleyDecomposition dec = decompose_covering(env, cfg.k0, sum.max_position, false);

    ordered_json js;
    js["env_seed"] = cfg.env.seed;
    js["walk_seed"] = walk_seed;
    js["n_steps"] = sum.n_steps;
    js["xi_star"] = sum.xi_star;
    js["max_position"] = sum.max_position;
    js["final_position"] = sum.final_position;
    js["seen_valleys"] = dec.seen_valleys(sum.max_position);
    js["steps_per_second"] = secs > 0 ? static_cast<double>(sum.n_steps) / secs : 0.0;
    ordered_json hitj = ordered_json::array();
    for (const auto& h : sum.hits) {
        ordered_json e;
        e["target"] = h.target;
        if (h.time)
            e["time"] = *h.time;
        else
            e["time"] = nullptr;  // censored at the step cap
        hitj.push_back(e);
    }
    js["hits"] = hitj;
    sink.emit("simulate.json", js.dump(2) + "\n");

    std::string csv = "probe_n,xi_star,max_pos,N_n,L_top1,L_top2\n";
    for (const auto& pr : sum.probes) {
        const int64_t N = dec.seen_valleys(pr.max_position);
        const std::vector<uint64_t> L = occupation_by_valley(pr.local_times, dec);
        const uint64_t top1 = L[static_cast<size_t>(N)];
        const uint64_t top2 = N >= 1 ? L[static_cast<size_t>(N - 1)] : 0;
        csv += std::to_string(pr.n) + "," + std::to_string(pr.xi_star) + "," +
               csv_int(pr.max_position) + "," + csv_int(N) + "," + std::to_string(top1) +
               "," + std::to_string(top2) + "\n";
    }
    sink.emit("simulate.csv", csv, /*to_stdout=*/false);
    return kExitOk;
}

int run_verify(const GlobalConfig& cfg, const std::string& study, OutputSink& sink) {
    ExperimentReport rep;
    if (study == "localization") {
        LocalizationConfig c;
        c.env = cfg.env;
        c.k0 = cfg.k0;
        c.master_seed = cfg.master_seed;
        rep = localization_study(c);
    } else if (study == "ratio") {
        RatioConfig c;
        c.env = cfg.env;
        c.master_seed = cfg.master_seed;
        rep = ratio_study(c);
    } else if (study == "lambda-tail") {
        LambdaTailConfig c;
        c.env = cfg.env;
        c.master_seed = cfg.master_seed;
        rep = lambda_tail_study(c);
    } else if (study == "height") {
        HeightScalingConfig c;
        c.env = cfg.env;
        c.master_seed = cfg.master_seed;
        rep = height_scaling_study(c);
    } else if (study == "hitting") {
        HittingScalingConfig c;
        c.env = cfg.env;
        c.master_seed = cfg.master_seed;
        rep = hitting_scaling_study(c);
    } else if (study == "exit-tail") {
        ExitTailConfig c;
        c.env = cfg.env;
        c.master_seed = cfg.master_seed;
        rep = exit_tail_study(c);
    } else if (study == "liminf") {
        LiminfConfig c;
        c.env = cfg.env;
        c.k0 = cfg.k0;
        c.master_seed = cfg.master_seed;
        rep = liminf_trace(c);
    } else {
        throw CLI::ValidationError("verify", "unknown study: " + study);
    }

    const ordered_json rj = report_to_json(rep);
    std::cout << rj.dump(2) << "\n";
    if (!sink.dir.empty()) write_report(rep, sink.dir);
    for (const auto& v : rep.verdicts)
        std::cerr << (v.pass ? "PASS " : "FAIL ") << v.criterion << ": " << v.comparison
                  << " (threshold " << format_double(v.threshold) << ", observed "
                  << format_double(v.observed) << ")\n";
    return rep.all_pass() ? kExitOk : kExitVerdictFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"valley decomposition, exact chain analytics and local-time Monte Carlo "
                 "for recurrent one-dimensional RWRE"};
    app.require_subcommand(1);

    // global configuration: flags override --config file values
    std::string config_path, family = "twopoint", out_dir, format = "csv";
    double a = 1.0, delta = 0.1, k0 = 5.0;
    uint64_t seed = 0, master_seed = 1;
    int verbosity = 1;

    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--family", family, "environment family: twopoint | uniform");
    app.add_option("--a", a, "TwoPoint log-odds step");
    app.add_option("--delta", delta, "UniformSymmetric ellipticity bound");
    app.add_option("--seed", seed, "environment seed");
    app.add_option("--k0", k0, "valley bootstrap constant K_0");
    app.add_option("--master-seed", master_seed, "master seed for studies");
    app.add_option("--out", out_dir, "output directory (RWRE_OUT overrides)");
    app.add_option("--format", format, "csv | json");
    app.add_option("--verbosity", verbosity, "log verbosity");

    auto* cmd_env = app.add_subcommand("env", "dump environment sites as CSV");
    cmd_env->fallthrough();
    int64_t dump_to = 0;
    cmd_env->add_option("--dump", dump_to, "dump sites 0..N (accepts N or 0..N)")
        ->transform([](std::string s) {
            const auto pos = s.find("..");
            return pos == std::string::npos ? s : s.substr(pos + 2);
        });

    auto* cmd_val = app.add_subcommand("valleys", "valley decomposition as CSV");
    cmd_val->fallthrough();
    int64_t horizon = 1'000'000;
    cmd_val->add_option("--horizon", horizon, "scan horizon in sites");

    auto* cmd_exact = app.add_subcommand("exact", "closed-form quantities with oracle checks");
    cmd_exact->fallthrough();
    std::string what, mode = "hit";
    int64_t qb = 1, qx = 2, qi = 3, left = 0, right = 10, start = 0;
    cmd_exact->add_option("quantity", what, "hitprob | visits | golosov | escape | oracle")
        ->required();
    cmd_exact->add_option("--b", qb);
    cmd_exact->add_option("--x", qx);
    cmd_exact->add_option("--i", qi);
    cmd_exact->add_option("--left", left);
    cmd_exact->add_option("--right", right);
    cmd_exact->add_option("--start", start);
    cmd_exact->add_option("--mode", mode, "hit | occupation");

    auto* cmd_sim = app.add_subcommand("simulate", "run the quenched walk");
    cmd_sim->fallthrough();
    uint64_t walk_seed = 0, steps = 1'000'000;
    std::vector<int64_t> hit_targets;
    cmd_sim->add_option("--walk-seed", walk_seed);
    cmd_sim->add_option("--steps", steps);
    cmd_sim->add_option("--hit", hit_targets)->delimiter(',');

    auto* cmd_verify = app.add_subcommand("verify", "run a verification study");
    cmd_verify->fallthrough();
    std::string study;
    cmd_verify
        ->add_option("study", study,
                     "localization | ratio | lambda-tail | height | hitting | exit-tail | liminf")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        GlobalConfig cfg;
        if (!config_path.empty()) cfg = parse_config_file(config_path);
        // flags override file values
        if (app.count("--family")) {
            if (family == "twopoint")
                cfg.env.family = EnvFamily::TwoPoint;
            else if (family == "uniform")
                cfg.env.family = EnvFamily::UniformSymmetric;
            else
                throw ValidationError({"family: must be \"twopoint\" or \"uniform\""});
        }
        if (app.count("--a")) cfg.env.a = a;
        if (app.count("--delta")) cfg.env.delta = delta;
        if (app.count("--seed")) cfg.env.seed = seed;
        if (app.count("--k0")) cfg.k0 = k0;
        if (app.count("--master-seed")) cfg.master_seed = master_seed;
        if (app.count("--out")) cfg.out_dir = out_dir;
        if (app.count("--format")) cfg.format = format;
        if (const char* env_out = std::getenv("RWRE_OUT")) cfg.out_dir = env_out;
        cfg.env.validate();

        OutputSink sink;
        sink.dir = cfg.out_dir;
        sink.config_used = config_to_json(cfg);

        int rc = kExitUsage;
        if (*cmd_env) rc = run_env_dump(cfg, dump_to, sink);
        if (*cmd_val) rc = run_valleys(cfg, horizon, sink);
        if (*cmd_exact) rc = run_exact(cfg, what, qb, qx, qi, left, right, start, mode, sink);
        if (*cmd_sim) rc = run_simulate(cfg, walk_seed, steps, hit_targets, sink);
        if (*cmd_verify) rc = run_verify(cfg, study, sink);
        sink.finish();
        return rc;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
