#include "rwre/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/chain_analytics.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

namespace {

// independent seed blocks per role within a study
enum SeedRole : uint64_t { kEnvRole = 0xE17, kWalkRole = 0xA3B, kSweepRole = 0x53E };

uint64_t role_seed(uint64_t master, uint64_t role, uint64_t index) {
    return derive_seed(derive_seed(master, role), index);
}

Environment make_env(const EnvironmentSpec& base, uint64_t seed) {
    EnvironmentSpec spec = base;
    spec.seed = seed;
    return Environment(spec);
}

nlohmann::ordered_json env_json(const EnvironmentSpec& spec) {
    nlohmann::ordered_json j;
    j["family"] = spec.family_name();
    if (spec.family == EnvFamily::TwoPoint)
        j["a"] = spec.a;
    else
        j["delta"] = spec.delta;
    return j;
}

double frac_true(const std::vector<bool>& v) {
    if (v.empty()) return 0.0;
    double c = 0.0;
    for (bool b : v) c += b ? 1.0 : 0.0;
    return c / static_cast<double>(v.size());
}

} // namespace

ValleyDecomposition decompose_covering(const Environment& env, double k0,
                                       int64_t min_sites, bool want_widths) {
    int64_t horizon = std::max<int64_t>(2 * min_sites, 4096);
    constexpr int64_t kHardCap = 1LL << 43;
    for (;;) {
        try {
            ScanOptions opts;
            opts.want_widths = want_widths;
            ValleyDecomposition dec = decompose(env, k0, horizon, opts);
            (void)dec.seen_valleys(min_sites);
            return dec;
        } catch (const HorizonTooSmall&) {
            if (horizon >= kHardCap) throw;
            horizon *= 2;
        }
    }
}

LocalizationPoint localization_fractions(const std::vector<uint64_t>& occupation,
                                         int64_t n_seen, uint64_t n) {
    LocalizationPoint out;
    const double denom = static_cast<double>(n + 1);
    double top2 = static_cast<double>(occupation[static_cast<size_t>(n_seen)]);
    if (n_seen >= 1) top2 += static_cast<double>(occupation[static_cast<size_t>(n_seen - 1)]);
    double early = 0.0;
    for (int64_t k = 1; k < n_seen - 1; ++k)
        early += static_cast<double>(occupation[static_cast<size_t>(k)]);
    out.f2 = top2 / denom;
    out.e = early / denom;
    return out;
}

RatioPoint ratio_statistics(const std::vector<uint64_t>& local_times,
                            const ValleyDecomposition& dec, int64_t N) {
    const Valley& vprev = dec.valleys[static_cast<size_t>(N - 1)];
    if (!vprev.complete) throw IncompleteValley("valley N-1 must be complete");
    const int64_t lo = vprev.start;
    const int64_t hi = dec.valleys[static_cast<size_t>(N)].start;
    double L = 0.0, maxxi = 0.0;
    for (int64_t x = lo; x < hi && x < static_cast<int64_t>(local_times.size()); ++x) {
        const double c = static_cast<double>(local_times[static_cast<size_t>(x)]);
        L += c;
        maxxi = std::max(maxxi, c);
    }
    const double xib = static_cast<double>(local_times[static_cast<size_t>(vprev.bottom)]);
    RatioPoint out;
    out.r1 = L / (vprev.lambda * xib);
    out.r2 = L / (vprev.lambda * maxxi);
    return out;
}

// ---------------------------------------------------------------------------
// localization: fraction of time in the last two seen valleys, early mass

ExperimentReport localization_study(const LocalizationConfig& cfg) {
    ExperimentReport rep;
    rep.study = "localization";
    rep.config = env_json(cfg.env);
    rep.config["k0"] = cfg.k0;
    rep.config["master_seed"] = cfg.master_seed;
    rep.config["n_seeds"] = cfg.n_seeds;
    rep.config["n_steps"] = cfg.n_steps;
    rep.config["median_f2_min"] = cfg.median_f2_min;
    rep.config["early_mass_max"] = cfg.early_mass_max;
    rep.config["early_mass_seed_frac"] = cfg.early_mass_seed_frac;
    rep.config["trend_seed_frac"] = cfg.trend_seed_frac;

    const size_t n = static_cast<size_t>(cfg.n_seeds);
    std::vector<std::vector<double>> f2_curves(n), e_curves(n);
    std::vector<double> probe_ns;

    parallel_for_indexed(n, [&](size_t s) {
        Environment env = make_env(cfg.env, role_seed(cfg.master_seed, kEnvRole, s));
        WalkConfig wc;
        wc.walk_seed = role_seed(cfg.master_seed, kWalkRole, s);
        wc.n_steps = cfg.n_steps;
        wc.step_cap = std::max<uint64_t>(cfg.n_steps, wc.step_cap);
        TrajectorySummary sum = run_walk(env, wc);
        ValleyDecomposition dec =
            decompose_covering(env, cfg.k0, sum.max_position, /*want_widths=*/false);

        std::vector<double> f2s, es;
        for (const auto& pr : sum.probes) {
            const int64_t N = dec.seen_valleys(pr.max_position);
            const std::vector<uint64_t> L = occupation_by_valley(pr.local_times, dec);
            const LocalizationPoint pt = localization_fractions(L, N, pr.n);
            f2s.push_back(pt.f2);
            es.push_back(pt.e);
        }
        f2_curves[s] = std::move(f2s);
        e_curves[s] = std::move(es);
        if (s == 0) {
            for (const auto& pr : sum.probes) probe_ns.push_back(static_cast<double>(pr.n));
        }
    });

    const size_t n_probes = f2_curves[0].size();
    Series f2_series{"median_f2", "n", "median_f2", {}, {}};
    Series e_series{"median_early_mass", "n", "median_early_mass", {}, {}};
    for (size_t p = 0; p < n_probes; ++p) {
        std::vector<double> f2p, ep;
        for (size_t s = 0; s < n; ++s) {
            f2p.push_back(f2_curves[s][p]);
            ep.push_back(e_curves[s][p]);
        }
        f2_series.xs.push_back(probe_ns[p]);
        f2_series.ys.push_back(stats::median(f2p));
        e_series.xs.push_back(probe_ns[p]);
        e_series.ys.push_back(stats::median(ep));
    }
    rep.series.push_back(std::move(f2_series));
    rep.series.push_back(std::move(e_series));

    std::vector<double> final_f2;
    std::vector<bool> e_small, e_trend;
    for (size_t s = 0; s < n; ++s) {
        final_f2.push_back(f2_curves[s].back());
        e_small.push_back(e_curves[s].back() < cfg.early_mass_max);
        // nonincreasing over the last 5 probes (small counting jitter allowed)
        bool mono = true;
        const size_t lo = n_probes >= 5 ? n_probes - 5 : 0;
        for (size_t p = lo + 1; p < n_probes; ++p)
            if (e_curves[s][p] > e_curves[s][p - 1] + 1e-12) mono = false;
        e_trend.push_back(mono);
    }

    const double med_f2 = stats::median(final_f2);
    rep.add_scalar("median_final_f2", med_f2);
    rep.add_scalar("frac_seeds_early_mass_small", frac_true(e_small));
    rep.add_scalar("frac_seeds_early_mass_nonincreasing", frac_true(e_trend));
    rep.add_verdict("localization_median_f2", "median final f2 >= threshold",
                    cfg.median_f2_min, med_f2, med_f2 >= cfg.median_f2_min);
    rep.add_verdict("localization_early_mass",
                    "fraction of seeds with final e(n) < " + format_double(cfg.early_mass_max),
                    cfg.early_mass_seed_frac, frac_true(e_small),
                    frac_true(e_small) >= cfg.early_mass_seed_frac);
    rep.add_verdict("localization_early_mass_trend",
                    "fraction of seeds with e(n) nonincreasing over last 5 probes",
                    cfg.trend_seed_frac, frac_true(e_trend),
                    frac_true(e_trend) >= cfg.trend_seed_frac);
    return rep;
}

// ---------------------------------------------------------------------------
// ratio bounds at n = T(m_N)

ExperimentReport ratio_study(const RatioConfig& cfg) {
    ExperimentReport rep;
    rep.study = "ratio";
    rep.config = env_json(cfg.env);
    rep.config["k0"] = cfg.k0;
    rep.config["master_seed"] = cfg.master_seed;
    rep.config["n_seeds"] = cfg.n_seeds;
    rep.config["n_range"] = {cfg.n_min, cfg.n_max};
    rep.config["step_cap"] = cfg.step_cap;
    rep.config["site_cap"] = cfg.site_cap;
    rep.config["r2_band"] = {cfg.r2_lo, cfg.r2_hi};
    rep.config["r1_max"] = cfg.r1_hi;
    rep.config["pair_frac"] = cfg.pair_frac;
    // feasibility: a target m_N enters the pair set only when the Golosov
    // bound on E T(m_N) fits the step budget (environment-only rule)
    rep.config["feasibility"] = "golosov_bound(m_N) <= step_cap";

    struct Pair {
        int N;
        double r1, r2;
    };
    const size_t n = static_cast<size_t>(cfg.n_seeds);
    std::vector<std::vector<Pair>> pairs(n);
    std::vector<int> censored(n, 0), infeasible(n, 0);

    parallel_for_indexed(n, [&](size_t s) {
        Environment env = make_env(cfg.env, role_seed(cfg.master_seed, kEnvRole, s));
        ScanOptions opts;
        opts.stop_after_complete = cfg.n_max;
        ValleyDecomposition dec;
        try {
            dec = decompose(env, cfg.k0, cfg.site_cap, opts);
        } catch (const HorizonTooSmall&) {
            return;
        }

        std::vector<int64_t> targets;
        std::vector<int> target_N;
        for (int N = cfg.n_min; N <= cfg.n_max; ++N) {
            if (static_cast<size_t>(N) >= dec.valleys.size()) break;
            if (!dec.valleys[static_cast<size_t>(N - 1)].complete) break;
            const int64_t mN = dec.valleys[static_cast<size_t>(N)].start;
            if (golosov_bound_log(env, mN) > std::log(static_cast<double>(cfg.step_cap))) {
                ++infeasible[s];
                continue;
            }
            targets.push_back(mN);
            target_N.push_back(N);
        }
        if (targets.empty()) return;

        WalkConfig wc;
        wc.walk_seed = role_seed(cfg.master_seed, kWalkRole, s);
        wc.n_steps = cfg.step_cap;
        wc.step_cap = cfg.step_cap;
        wc.hitting_targets = targets;
        wc.snapshot_on_hit = true;
        wc.stop_after_targets = true;
        TrajectorySummary sum = run_walk(env, wc);

        for (size_t t = 0; t < targets.size(); ++t) {
            const HitRecord& hr = sum.hits[t];
            if (!hr.time) {
                ++censored[s];
                continue;
            }
            const int N = target_N[t];
            const RatioPoint pt = ratio_statistics(hr.local_times, dec, N);
            pairs[s].push_back({N, pt.r1, pt.r2});
        }
    });

    Series s1{"r1", "N", "r1", {}, {}};
    Series s2{"r2", "N", "r2", {}, {}};
    std::vector<bool> r1_ok, r2_ok;
    int total_censored = 0, total_infeasible = 0;
    for (size_t s = 0; s < n; ++s) {
        total_censored += censored[s];
        total_infeasible += infeasible[s];
        for (const auto& p : pairs[s]) {
            s1.xs.push_back(p.N);
            s1.ys.push_back(p.r1);
            s2.xs.push_back(p.N);
            s2.ys.push_back(p.r2);
            r1_ok.push_back(p.r1 <= cfg.r1_hi);
            r2_ok.push_back(p.r2 >= cfg.r2_lo && p.r2 <= cfg.r2_hi);
        }
    }
    rep.series.push_back(std::move(s1));
    rep.series.push_back(std::move(s2));
    rep.add_scalar("n_pairs", static_cast<double>(r1_ok.size()));
    rep.add_scalar("n_censored", total_censored);
    rep.add_scalar("n_infeasible", total_infeasible);
    rep.add_verdict("ratio_r2_band", "fraction of pairs with r2 in band", cfg.pair_frac,
                    frac_true(r2_ok), frac_true(r2_ok) >= cfg.pair_frac);
    rep.add_verdict("ratio_r1_bound", "fraction of pairs with r1 <= bound", cfg.pair_frac,
                    frac_true(r1_ok), frac_true(r1_ok) >= cfg.pair_frac);
    return rep;
}

// ---------------------------------------------------------------------------
// effective-width tail

ExperimentReport lambda_tail_study(const LambdaTailConfig& cfg) {
    ExperimentReport rep;
    rep.study = "lambda_tail";
    rep.config = env_json(cfg.env);
    rep.config["master_seed"] = cfg.master_seed;
    rep.config["rhos"] = cfg.rhos;
    rep.config["n_samples"] = cfg.n_samples;
    rep.config["fit_points"] = cfg.fit_points;
    rep.config["r2_min"] = cfg.r2_min;
    rep.config["rate_ratio_max"] = cfg.rate_ratio_max;

    std::vector<double> rates;
    double min_width = std::numeric_limits<double>::infinity();

    for (size_t ri = 0; ri < cfg.rhos.size(); ++ri) {
        const double rho = cfg.rhos[ri];
        std::vector<double> widths(static_cast<size_t>(cfg.n_samples));
        parallel_for_indexed(widths.size(), [&](size_t i) {
            Environment env = make_env(
                cfg.env, role_seed(cfg.master_seed, kEnvRole, ri * 1'000'000 + i));
            widths[i] = rho_valley(env, rho, cfg.scan_cap).width;
        });
        for (double w : widths) min_width = std::min(min_width, w);

        std::vector<double> sorted = widths;
        std::sort(sorted.begin(), sorted.end());
        const double med = stats::quantile(sorted, 0.5);
        const double q99 = stats::quantile(sorted, 0.99);

        std::vector<double> rs, logS;
        for (int p = 0; p < cfg.fit_points; ++p) {
            const double r =
                med + (q99 - med) * static_cast<double>(p) / (cfg.fit_points - 1);
            const auto it = std::upper_bound(sorted.begin(), sorted.end(), r);
            const double surv =
                static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
            if (surv <= 0.0) break;
            rs.push_back(r);
            logS.push_back(std::log(surv));
        }
        const stats::LinearFit fit = stats::ols_fit(rs, logS);
        rates.push_back(-fit.slope);

        Series s{"log_survival_rho" + format_double(rho), "r", "log_S", rs, logS};
        rep.series.push_back(std::move(s));
        rep.add_scalar("rate_rho" + format_double(rho), -fit.slope);
        rep.add_verdict("lambda_tail_slope_rho" + format_double(rho),
                        "log-survival fit slope < 0", 0.0, fit.slope, fit.slope < 0.0);
        rep.add_verdict("lambda_tail_fit_rho" + format_double(rho),
                        "log-survival fit R^2 >= threshold", cfg.r2_min, fit.r2,
                        fit.r2 >= cfg.r2_min);
    }

    const double ratio =
        *std::max_element(rates.begin(), rates.end()) /
        *std::min_element(rates.begin(), rates.end());
    rep.add_scalar("min_width", min_width);
    rep.add_verdict("lambda_tail_rate_uniformity", "max/min fitted rate across rho",
                    cfg.rate_ratio_max, ratio, ratio <= cfg.rate_ratio_max);
    rep.add_verdict("lambda_width_floor", "min sampled width >= 1", 1.0, min_width,
                    min_width >= 1.0);
    return rep;
}

// ---------------------------------------------------------------------------
// height scaling: slope of log H_k, ratio laws

ExperimentReport height_scaling_study(const HeightScalingConfig& cfg) {
    ExperimentReport rep;
    rep.study = "height_scaling";
    rep.config = env_json(cfg.env);
    rep.config["k0"] = cfg.k0;
    rep.config["master_seed"] = cfg.master_seed;
    rep.config["slope_envs"] = cfg.slope_envs;
    rep.config["k_window"] = {cfg.k_lo, cfg.k_hi};
    rep.config["slope_site_cap"] = cfg.slope_site_cap;
    rep.config["slope_band"] = {cfg.slope_lo, cfg.slope_hi};
    rep.config["ks_envs"] = cfg.ks_envs;
    rep.config["ks_k_window"] = {cfg.ks_k_min, cfg.ks_k_max};
    rep.config["ks_site_cap"] = cfg.ks_site_cap;
    rep.config["min_ratio_samples"] = cfg.min_ratio_samples;
    rep.config["ks_uniform_max"] = cfg.ks_uniform_max;
    rep.config["ks_exp_max"] = cfg.ks_exp_max;
    rep.config["k0_sweep"] = cfg.k0_sweep;

    auto scan = [&](uint64_t seed, double k0, int64_t cap, int k_stop, bool stop_on_h) {
        Environment env = make_env(cfg.env, seed);
        ScanOptions opts;
        opts.want_widths = false;
        if (stop_on_h)
            opts.stop_after_h_known = k_stop;  // H_k is often pinned well before theta_{k+1}
        else
            opts.stop_after_complete = k_stop + 1;
        return decompose(env, k0, cap, opts);
    };

    // slope arm
    const size_t ns = static_cast<size_t>(cfg.slope_envs);
    std::vector<std::vector<std::pair<int, double>>> slope_pts(ns);
    std::vector<int> mono_violations(ns, 0);
    parallel_for_indexed(ns, [&](size_t e) {
        ValleyDecomposition dec;
        try {
            dec = scan(role_seed(cfg.master_seed, kEnvRole, e), cfg.k0,
                       cfg.slope_site_cap, cfg.k_hi, /*stop_on_h=*/true);
        } catch (const HorizonTooSmall&) {
            return;
        }
        double prev_h = 0.0, prev_hp = 0.0;
        for (const auto& vk : dec.valleys) {
            if (vk.h_known && vk.k >= cfg.k_lo && vk.k <= cfg.k_hi)
                slope_pts[e].push_back({static_cast<int>(vk.k), std::log(vk.h)});
            if (vk.h_known && vk.k >= 1 && vk.h < prev_h) ++mono_violations[e];
            if (vk.complete && vk.k >= 1 && vk.h_plus < prev_hp) ++mono_violations[e];
            if (vk.h_known) prev_h = vk.h;
            if (vk.complete) prev_hp = vk.h_plus; else break;
        }
    });

    std::vector<double> ks_xs, ks_ys;
    int total_mono = 0;
    for (size_t e = 0; e < ns; ++e) {
        total_mono += mono_violations[e];
        for (const auto& [k, lh] : slope_pts[e]) {
            ks_xs.push_back(static_cast<double>(k));
            ks_ys.push_back(lh);
        }
    }
    const stats::LinearFit fit = stats::ols_fit(ks_xs, ks_ys);

    Series mean_series{"mean_log_h", "k", "mean_log_H", {}, {}};
    for (int k = cfg.k_lo; k <= cfg.k_hi; ++k) {
        std::vector<double> vals;
        for (size_t i = 0; i < ks_xs.size(); ++i)
            if (static_cast<int>(ks_xs[i]) == k) vals.push_back(ks_ys[i]);
        if (!vals.empty()) {
            mean_series.xs.push_back(k);
            mean_series.ys.push_back(stats::mean(vals));
        }
    }
    rep.series.push_back(std::move(mean_series));
    rep.add_scalar("slope_points", static_cast<double>(ks_xs.size()));
    rep.add_scalar("slope", fit.slope);
    rep.add_verdict("height_slope", "pooled OLS slope of log H_k on k in band", cfg.slope_lo,
                    fit.slope, fit.slope >= cfg.slope_lo && fit.slope <= cfg.slope_hi);
    rep.add_verdict("height_monotone", "H_k and H_k^+ nondecreasing, violations", 0.0,
                    static_cast<double>(total_mono), total_mono == 0);

    // ratio arm
    const size_t nk = static_cast<size_t>(cfg.ks_envs);
    std::vector<std::vector<double>> uni(nk), expo(nk);
    parallel_for_indexed(nk, [&](size_t e) {
        ValleyDecomposition dec;
        try {
            dec = scan(role_seed(cfg.master_seed, kSweepRole, e), cfg.k0, cfg.ks_site_cap,
                       cfg.ks_k_max, false);
        } catch (const HorizonTooSmall&) {
            return;
        }
        for (size_t k = static_cast<size_t>(cfg.ks_k_min);
             k <= static_cast<size_t>(cfg.ks_k_max) && k < dec.valleys.size(); ++k) {
            const Valley& vk = dec.valleys[k];
            const Valley& vprev = dec.valleys[k - 1];
            if (!vk.complete || !vprev.complete) break;
            uni[e].push_back(vprev.h_plus / vk.h_plus);
            expo[e].push_back((vk.h_minus - vprev.h_plus) / vprev.h_plus);
        }
    });

    std::vector<double> uni_all, expo_all;
    for (size_t e = 0; e < nk; ++e) {
        uni_all.insert(uni_all.end(), uni[e].begin(), uni[e].end());
        expo_all.insert(expo_all.end(), expo[e].begin(), expo[e].end());
    }
    const double ks_u = stats::ks_uniform01(uni_all);
    const double ks_e = stats::ks_exp1(expo_all);
    rep.add_scalar("ratio_samples", static_cast<double>(uni_all.size()));
    rep.add_verdict("height_ratio_samples", "pooled ratio samples >= minimum",
                    cfg.min_ratio_samples, static_cast<double>(uni_all.size()),
                    uni_all.size() >= static_cast<size_t>(cfg.min_ratio_samples));
    rep.add_verdict("height_ks_uniform", "KS(H_{k-1}^+/H_k^+, U(0,1))", cfg.ks_uniform_max,
                    ks_u, ks_u <= cfg.ks_uniform_max);
    rep.add_verdict("height_ks_exp", "KS((H_k^- - H_{k-1}^+)/H_{k-1}^+, Exp(1))",
                    cfg.ks_exp_max, ks_e, ks_e <= cfg.ks_exp_max);

    {
        std::sort(uni_all.begin(), uni_all.end());
        Series qq{"uniform_ratio_qq", "uniform_quantile", "sample", {}, {}};
        const size_t stride = std::max<size_t>(1, uni_all.size() / 200);
        for (size_t i = 0; i < uni_all.size(); i += stride) {
            qq.xs.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(uni_all.size()));
            qq.ys.push_back(uni_all[i]);
        }
        rep.series.push_back(std::move(qq));
    }

    // report-only K_0 sweep
    for (size_t si = 0; si < cfg.k0_sweep.size(); ++si) {
        const double k0s = cfg.k0_sweep[si];
        const size_t nsw = static_cast<size_t>(cfg.sweep_envs);
        std::vector<std::vector<std::pair<int, double>>> pts(nsw);
        parallel_for_indexed(nsw, [&](size_t e) {
            try {
                ValleyDecomposition dec =
                    scan(role_seed(cfg.master_seed, kSweepRole + 7 + si, e), k0s,
                         cfg.sweep_site_cap, cfg.k_hi, true);
                for (const auto& vk : dec.valleys) {
                    if (vk.h_known && vk.k >= cfg.k_lo && vk.k <= cfg.k_hi)
                        pts[e].push_back({static_cast<int>(vk.k), std::log(vk.h)});
                    if (!vk.complete) break;
                }
            } catch (const HorizonTooSmall&) {
            }
        });
        std::vector<double> xs, ys;
        for (const auto& v : pts)
            for (const auto& [k, lh] : v) {
                xs.push_back(k);
                ys.push_back(lh);
            }
        if (xs.size() >= 8) {
            rep.add_scalar("sweep_slope_k0_" + format_double(k0s),
                           stats::ols_fit(xs, ys).slope);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// hitting-time scaling

ExperimentReport hitting_scaling_study(const HittingScalingConfig& cfg) {
    ExperimentReport rep;
    rep.study = "hitting_scaling";
    rep.config = env_json(cfg.env);
    rep.config["master_seed"] = cfg.master_seed;
    rep.config["n_seeds"] = cfg.n_seeds;
    rep.config["targets"] = cfg.targets;
    rep.config["step_cap"] = cfg.step_cap;
    rep.config["band"] = {cfg.band_lo, cfg.band_hi};

    for (int64_t x : cfg.targets)
        if (x < cfg.x_min)
            throw std::invalid_argument("hitting targets must be >= x_min for the statistic");

    const size_t n = static_cast<size_t>(cfg.n_seeds);
    std::vector<std::vector<std::optional<uint64_t>>> times(n);
    parallel_for_indexed(n, [&](size_t s) {
        Environment env = make_env(cfg.env, role_seed(cfg.master_seed, kEnvRole, s));
        times[s] = first_hitting_times(env, role_seed(cfg.master_seed, kWalkRole, s),
                                       cfg.targets, cfg.step_cap);
    });

    int censored = 0;
    std::vector<double> medians;
    for (size_t t = 0; t < cfg.targets.size(); ++t) {
        std::vector<double> statv;
        Series s{"stat_x" + std::to_string(cfg.targets[t]), "seed", "loglogT_over_logx",
                 {}, {}};
        for (size_t sd = 0; sd < n; ++sd) {
            if (!times[sd][t]) {
                ++censored;
                continue;
            }
            const double T = static_cast<double>(*times[sd][t]);
            const double stat =
                std::log(std::log(T)) / std::log(static_cast<double>(cfg.targets[t]));
            statv.push_back(stat);
            s.xs.push_back(static_cast<double>(sd));
            s.ys.push_back(stat);
        }
        rep.series.push_back(std::move(s));
        const double med = stats::median(statv);
        medians.push_back(med);
        rep.add_scalar("median_stat_x" + std::to_string(cfg.targets[t]), med);
        rep.add_verdict("hitting_scaling_x" + std::to_string(cfg.targets[t]),
                        "median loglog T(x)/log x in band", cfg.band_lo, med,
                        med >= cfg.band_lo && med <= cfg.band_hi);
    }
    rep.add_scalar("n_censored", censored);
    // weak monotone trend of the medians, reported only
    bool trend = true;
    for (size_t i = 1; i < medians.size(); ++i)
        if (medians[i] + 0.05 < medians[i - 1]) trend = false;
    rep.add_scalar("medians_nondecreasing_trend", trend ? 1.0 : 0.0);
    return rep;
}

// ---------------------------------------------------------------------------
// exit-time tail envelope

ExperimentReport exit_tail_study(const ExitTailConfig& cfg) {
    ExperimentReport rep;
    rep.study = "exit_tail";
    rep.config = env_json(cfg.env);
    rep.config["k0"] = cfg.k0;
    rep.config["master_seed"] = cfg.master_seed;
    rep.config["n_envs"] = cfg.n_envs;
    rep.config["ks"] = cfg.ks;
    rep.config["h_max"] = cfg.h_max;
    rep.config["h_obs_max"] = cfg.h_obs_max;
    rep.config["n_restarts"] = cfg.n_restarts;
    rep.config["per_restart_cap"] = cfg.per_restart_cap;
    rep.config["stability_factor"] = cfg.stability_factor;

    const int max_k = *std::max_element(cfg.ks.begin(), cfg.ks.end());
    const size_t n = static_cast<size_t>(cfg.n_envs);
    std::vector<std::vector<std::pair<int, double>>> envelopes(n);  // (k, envelope)
    std::vector<int> skipped(n, 0);

    parallel_for_indexed(n, [&](size_t e) {
        Environment env = make_env(cfg.env, role_seed(cfg.master_seed, kEnvRole, e));
        ScanOptions opts;
        opts.want_widths = false;
        opts.stop_after_complete = max_k + 1;
        ValleyDecomposition dec;
        try {
            dec = decompose(env, cfg.k0, cfg.site_cap, opts);
        } catch (const HorizonTooSmall&) {
            return;
        }
        for (int k : cfg.ks) {
            if (static_cast<size_t>(k) >= dec.valleys.size() ||
                !dec.valleys[static_cast<size_t>(k)].complete) {
                ++skipped[e];
                continue;
            }
            const Valley& vk = dec.valleys[static_cast<size_t>(k)];
            if (vk.h > cfg.h_max || vk.h > cfg.h_obs_max) {
                ++skipped[e];
                continue;
            }
            const int64_t m_next = dec.valleys[static_cast<size_t>(k + 1)].start;
            if (!(vk.start < vk.bottom && vk.bottom < m_next)) {
                ++skipped[e];
                continue;
            }
            auto taus = sample_exit_times(env,
                                          role_seed(cfg.master_seed, kWalkRole,
                                                    e * 100 + static_cast<uint64_t>(k)),
                                          vk.start, m_next, vk.bottom,
                                          static_cast<uint64_t>(cfg.n_restarts),
                                          cfg.per_restart_cap);
            std::vector<uint64_t> finite;
            for (const auto& t : taus)
                if (t) finite.push_back(*t);
            std::sort(finite.begin(), finite.end());

            double env_sup = 0.0;
            for (double m = 2.0; m <= static_cast<double>(cfg.per_restart_cap); m *= 1.5) {
                const auto it = std::lower_bound(finite.begin(), finite.end(),
                                                 static_cast<uint64_t>(m));
                const double p_hat = static_cast<double>(it - finite.begin()) /
                                     static_cast<double>(cfg.n_restarts);
                if (p_hat == 0.0) continue;
                env_sup = std::max(env_sup, p_hat * std::exp(vk.h) / m);
            }
            if (env_sup > 0.0) envelopes[e].push_back({k, env_sup});
        }
    });

    std::vector<double> med_by_k;
    for (int k : cfg.ks) {
        std::vector<double> vals;
        Series s{"envelope_k" + std::to_string(k), "env", "envelope", {}, {}};
        for (size_t e = 0; e < n; ++e)
            for (const auto& [kk, v] : envelopes[e])
                if (kk == k) {
                    vals.push_back(v);
                    s.xs.push_back(static_cast<double>(e));
                    s.ys.push_back(v);
                }
        rep.series.push_back(std::move(s));
        if (!vals.empty()) {
            med_by_k.push_back(stats::median(vals));
            rep.add_scalar("median_envelope_k" + std::to_string(k), med_by_k.back());
        }
    }
    int total_skipped = 0;
    for (int sk : skipped) total_skipped += sk;
    rep.add_scalar("n_skipped", total_skipped);
    if (med_by_k.size() >= 2) {
        const double ratio = *std::max_element(med_by_k.begin(), med_by_k.end()) /
                             *std::min_element(med_by_k.begin(), med_by_k.end());
        rep.add_verdict("exit_tail_stability", "median envelope spread across k",
                        cfg.stability_factor, ratio, ratio <= cfg.stability_factor);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// liminf statistic trace (monitoring -- constant c not desk-verifiable)

ExperimentReport liminf_trace(const LiminfConfig& cfg) {
    ExperimentReport rep;
    rep.study = "liminf_trace";
    rep.config = env_json(cfg.env);
    rep.config["k0"] = cfg.k0;
    rep.config["master_seed"] = cfg.master_seed;
    rep.config["n_seeds"] = cfg.n_seeds;
    rep.config["n_steps"] = cfg.n_steps;
    rep.config["probe_floor"] = cfg.probe_floor;
    rep.config["s_max"] = cfg.s_max;
    rep.config["favorite_ratio_min"] = cfg.favorite_ratio_min;
    rep.config["favorite_seed_frac"] = cfg.favorite_seed_frac;
    rep.config["note"] = "monitoring -- constant c not desk-verifiable";

    const size_t n = static_cast<size_t>(cfg.n_seeds);
    std::vector<std::vector<std::pair<double, double>>> s_curves(n);
    std::vector<double> favorites(n, std::numeric_limits<double>::quiet_NaN());

    parallel_for_indexed(n, [&](size_t s) {
        Environment env = make_env(cfg.env, role_seed(cfg.master_seed, kEnvRole, s));
        WalkConfig wc;
        wc.walk_seed = role_seed(cfg.master_seed, kWalkRole, s);
        wc.n_steps = cfg.n_steps;
        wc.step_cap = std::max<uint64_t>(cfg.n_steps, wc.step_cap);
        TrajectorySummary sum = run_walk(env, wc);
        ValleyDecomposition dec =
            decompose_covering(env, cfg.k0, sum.max_position, /*want_widths=*/false);

        for (const auto& pr : sum.probes) {
            if (pr.n < cfg.probe_floor) continue;
            const double lll = std::log(std::log(std::log(static_cast<double>(pr.n))));
            s_curves[s].push_back(
                {static_cast<double>(pr.n),
                 static_cast<double>(pr.xi_star) * lll / static_cast<double>(pr.n + 1)});
        }

        const int64_t N = dec.seen_valleys(sum.max_position);
        if (N >= 2) {
            const auto& lt = sum.local_times;
            const int64_t bN = dec.valleys[static_cast<size_t>(N)].bottom;
            const int64_t bN1 = dec.valleys[static_cast<size_t>(N - 1)].bottom;
            const int64_t mlow = dec.valleys[static_cast<size_t>(N - 1)].start;
            double num = 0.0;
            if (bN >= 0 && bN < static_cast<int64_t>(lt.size()))
                num += static_cast<double>(lt[static_cast<size_t>(bN)]);
            if (bN1 >= 0 && bN1 < static_cast<int64_t>(lt.size()))
                num += static_cast<double>(lt[static_cast<size_t>(bN1)]);
            double den = 0.0;
            for (int64_t y = 0; y < mlow && y < static_cast<int64_t>(lt.size()); ++y)
                den = std::max(den, static_cast<double>(lt[static_cast<size_t>(y)]));
            if (den > 0.0) favorites[s] = num / den;
        }
    });

    Series med_s{"median_s", "n", "median_s", {}, {}};
    if (!s_curves[0].empty()) {
        for (size_t p = 0; p < s_curves[0].size(); ++p) {
            std::vector<double> vals;
            for (size_t s = 0; s < n; ++s)
                if (p < s_curves[s].size()) vals.push_back(s_curves[s][p].second);
            med_s.xs.push_back(s_curves[0][p].first);
            med_s.ys.push_back(stats::median(vals));
        }
    }
    rep.series.push_back(std::move(med_s));

    double s_min = std::numeric_limits<double>::infinity(), s_peak = 0.0;
    for (size_t s = 0; s < n; ++s)
        for (const auto& [pn, sv] : s_curves[s]) {
            s_min = std::min(s_min, sv);
            s_peak = std::max(s_peak, sv);
        }
    std::vector<bool> fav_ok;
    Series fav{"favorite_ratio", "seed", "ratio", {}, {}};
    for (size_t s = 0; s < n; ++s) {
        if (std::isnan(favorites[s])) continue;
        fav_ok.push_back(favorites[s] >= cfg.favorite_ratio_min);
        fav.xs.push_back(static_cast<double>(s));
        fav.ys.push_back(favorites[s]);
    }
    rep.series.push_back(std::move(fav));

    rep.add_scalar("s_min", s_min);
    rep.add_scalar("s_max_observed", s_peak);
    rep.add_scalar("n_favorite_defined", static_cast<double>(fav_ok.size()));
    rep.add_verdict("liminf_s_positive", "min s(n) over probes > 0", 0.0, s_min, s_min > 0.0);
    rep.add_verdict("liminf_s_bounded", "max s(n) over probes < bound", cfg.s_max, s_peak,
                    s_peak < cfg.s_max);
    rep.add_verdict("liminf_favorite_ratio",
                    "fraction of seeds with favorite-site ratio >= threshold",
                    cfg.favorite_seed_frac, frac_true(fav_ok),
                    frac_true(fav_ok) >= cfg.favorite_seed_frac);
    return rep;
}

} // namespace rwre
