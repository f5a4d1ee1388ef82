#pragma once
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/valleys.hpp"

namespace rwre {

struct StepCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Walk parameters. The PRNG stream is derive_seed(walk_seed, replica); one
// uniform draw is consumed per step except the forced reflection 0 -> 1,
// which is deterministic and consumes none.
struct WalkConfig {
    uint64_t walk_seed = 0;
    uint64_t replica = 0;
    uint64_t n_steps = 0;
    uint64_t step_cap = 10'000'000'000ULL;
    std::vector<uint64_t> probe_schedule;  // empty: geometric, ratio sqrt(2)
    std::vector<int64_t> hitting_targets;
    bool snapshot_on_hit = false;    // keep the local-time table at each hit
    bool stop_after_targets = false; // end the walk once every target is hit
};

// round(2^{j/2}) deduplicated, capped by n_steps, with n_steps appended
std::vector<uint64_t> default_probe_schedule(uint64_t n_steps);

struct ProbeRecord {
    uint64_t n = 0;
    uint64_t xi_star = 0;
    int64_t max_position = 0;
    std::vector<uint64_t> local_times;  // xi(n, x) for x = 0..max_position
};

struct HitRecord {
    int64_t target = 0;
    std::optional<uint64_t> time;        // T(target); nullopt = not reached in n_steps
    std::vector<uint64_t> local_times;   // filled when snapshot_on_hit and reached
};

// Exact statistics of one walk: local times count positions at steps
// j = 0..n, so every table sums to n+1.
struct TrajectorySummary {
    uint64_t n_steps = 0;
    uint64_t xi_star = 0;
    int64_t max_position = 0;
    int64_t final_position = 0;
    std::vector<uint64_t> local_times;  // final table, x = 0..max_position
    std::vector<ProbeRecord> probes;
    std::vector<HitRecord> hits;
};

TrajectorySummary run_walk(const Environment& env, const WalkConfig& cfg);

// T(x) = inf{n >= 1: X_n = x} for the walk started at 0; nullopt once the
// step cap is hit (censored, never extrapolated)
std::optional<uint64_t> first_hitting_time(const Environment& env, uint64_t walk_seed,
                                           int64_t x, uint64_t step_cap);

// nested hitting times of several targets from one walk
std::vector<std::optional<uint64_t>> first_hitting_times(const Environment& env,
                                                         uint64_t walk_seed,
                                                         std::vector<int64_t> targets,
                                                         uint64_t step_cap);

// Per-excursion visit counts at designated sites for excursions from b
// (consecutive returns to b). Census sites must differ from the anchor.
struct ExcursionCensus {
    int64_t anchor = 0;
    std::vector<int64_t> sites;
    std::vector<std::vector<uint64_t>> visits;  // visits[j][s]: excursion j, sites[s]
    std::vector<uint64_t> durations;            // complete excursion lengths, >= 2
    uint64_t completed = 0;
};

ExcursionCensus excursion_census(const Environment& env, uint64_t walk_seed, int64_t b,
                                 const std::vector<int64_t>& sites, uint64_t n_excursions,
                                 uint64_t step_cap = 10'000'000'000ULL);

// Exit times tau = inf{n > 0: X_n outside (lo, hi)} from independent
// restarts at `start`; nullopt where the per-sample cap was hit.
std::vector<std::optional<uint64_t>> sample_exit_times(const Environment& env,
                                                       uint64_t walk_seed, int64_t lo,
                                                       int64_t hi, int64_t start,
                                                       uint64_t n_samples,
                                                       uint64_t per_sample_cap);

// L(n,k) = sum of xi(n,x) over the k-th valley span, for every started
// valley; sums to n+1 by the partition property.
std::vector<uint64_t> occupation_by_valley(const std::vector<uint64_t>& local_times,
                                           const ValleyDecomposition& dec);

// N_n from a summary: valleys whose start the walk has reached
int64_t seen_valleys(const TrajectorySummary& summary, const ValleyDecomposition& dec);

} // namespace rwre
