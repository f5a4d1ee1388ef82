#pragma once
#include <cstdint>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/report.hpp"
#include "rwre/simulator.hpp"
#include "rwre/valleys.hpp"

namespace rwre {

// Decomposition guaranteed to resolve valley membership and N_n for every
// site up to min_sites: the horizon is doubled until no pending valley-start
// candidate interferes.
ValleyDecomposition decompose_covering(const Environment& env, double k0,
                                       int64_t min_sites, bool want_widths = true);

// ---------------------------------------------------------------------------
// Study estimators, exposed for validation on forced local-time tables.

struct LocalizationPoint {
    double f2 = 0.0;  // (L(n, N) + L(n, N-1)) / (n+1)
    double e = 0.0;   // sum_{1 <= k < N-1} L(n,k) / (n+1)
};
LocalizationPoint localization_fractions(const std::vector<uint64_t>& occupation,
                                         int64_t n_seen, uint64_t n);

struct RatioPoint {
    double r1 = 0.0;  // L / (Lambda_{N-1} xi(b_{N-1}))
    double r2 = 0.0;  // L / (Lambda_{N-1} max xi over [m_{N-1}, m_N))
};
// local_times is the table at n = T(m_N)
RatioPoint ratio_statistics(const std::vector<uint64_t>& local_times,
                            const ValleyDecomposition& dec, int64_t N);

// ---------------------------------------------------------------------------
// Study configurations. Every threshold a verdict uses lives here and is
// echoed verbatim into the report.

struct LocalizationConfig {
    EnvironmentSpec env;         // seed field unused; seeds derived per replica
    double k0 = 5.0;
    uint64_t master_seed = 0x5eed'10c4'11ceULL;
    int n_seeds = 100;
    uint64_t n_steps = 100'000'000;
    double median_f2_min = 0.95;      // median over seeds of final-probe f2
    double early_mass_max = 0.05;     // e(n) bound at the final probe
    double early_mass_seed_frac = 0.80;
    double trend_seed_frac = 0.80;    // report-only: e nonincreasing over last probes
};
ExperimentReport localization_study(const LocalizationConfig& cfg);

struct RatioConfig {
    EnvironmentSpec env;
    double k0 = 2.0;              // small K_0 keeps T(m_N), N <= 6, inside the step cap
    uint64_t master_seed = 0x5eed'4a7105ULL;
    int n_seeds = 100;
    int n_min = 3;
    int n_max = 6;
    uint64_t step_cap = 4'000'000'000ULL;
    int64_t site_cap = 100'000'000;
    double r2_lo = 1e-2;
    double r2_hi = 1.0;
    double r1_hi = 1e2;
    double pair_frac = 0.90;
};
ExperimentReport ratio_study(const RatioConfig& cfg);

struct LambdaTailConfig {
    EnvironmentSpec env;
    uint64_t master_seed = 0x5eed'7a11ULL;
    std::vector<double> rhos = {5.0, 10.0, 20.0, 40.0};
    int n_samples = 10'000;
    int64_t scan_cap = 1'000'000'000LL;
    int fit_points = 25;
    double r2_min = 0.90;         // linear fit quality of log-survival
    double rate_ratio_max = 3.0;  // uniformity of fitted rates across rho
};
ExperimentReport lambda_tail_study(const LambdaTailConfig& cfg);

struct HeightScalingConfig {
    EnvironmentSpec env;
    double k0 = 1.0;  // keeps valley 9 within a desk-scale span (m_k ~ H_{k-1}^2)
    uint64_t master_seed = 0x5eed'6e194257ULL;
    // slope arm: deep scans pooling log H_k for k in [k_lo, k_hi]
    int slope_envs = 200;
    int k_lo = 4;
    int k_hi = 9;
    int64_t slope_site_cap = 16'000'000'000LL;
    double slope_lo = 0.7;
    double slope_hi = 1.3;
    // ratio arm: many shallower scans pooling the two ratio laws for k >= 5;
    // capped at theta_{ks_k_max+1} where truncation bias is negligible
    int ks_envs = 800;
    int ks_k_min = 5;
    int ks_k_max = 7;
    int64_t ks_site_cap = 600'000'000LL;
    int min_ratio_samples = 2000;
    double ks_uniform_max = 0.08;
    double ks_exp_max = 0.10;
    // report-only K_0 sweep (insensitivity)
    std::vector<double> k0_sweep = {2.0, 5.0, 10.0};
    int sweep_envs = 40;
    int64_t sweep_site_cap = 2'000'000'000LL;
};
ExperimentReport height_scaling_study(const HeightScalingConfig& cfg);

struct HittingScalingConfig {
    EnvironmentSpec env;
    uint64_t master_seed = 0x5eed'816'713eULL;
    int n_seeds = 50;
    std::vector<int64_t> targets = {100, 200, 250};
    int64_t x_min = 16;  // loglog T / log x needs x comfortably above 1
    uint64_t step_cap = 10'000'000'000ULL;
    double band_lo = 0.3;
    double band_hi = 0.7;
};
ExperimentReport hitting_scaling_study(const HittingScalingConfig& cfg);

struct ExitTailConfig {
    EnvironmentSpec env;
    double k0 = 2.0;  // above the increment bound, so valley starts sit strictly left of bottoms
    uint64_t master_seed = 0x5eed'e817'7a11ULL;
    int n_envs = 20;
    std::vector<int> ks = {2, 3, 4};
    double h_max = 25.0;        // spec precondition: deeper valleys have unobservable exits
    double h_obs_max = 14.0;    // restart budget makes exits visible only up to here
    int n_restarts = 2000;
    uint64_t per_restart_cap = 100'000;
    int64_t site_cap = 100'000'000;
    double stability_factor = 2.0;  // report-only: envelope medians across k
};
ExperimentReport exit_tail_study(const ExitTailConfig& cfg);

struct LiminfConfig {
    EnvironmentSpec env;
    double k0 = 5.0;
    uint64_t master_seed = 0x5eed'11f1'1aceULL;
    int n_seeds = 100;
    uint64_t n_steps = 100'000'000;
    uint64_t probe_floor = 10'000;  // s(n) monitored for probes n >= floor
    double s_max = 10.0;            // sanity band; the constant itself is not desk-verifiable
    double favorite_ratio_min = 10.0;
    double favorite_seed_frac = 0.80;
};
ExperimentReport liminf_trace(const LiminfConfig& cfg);

} // namespace rwre
