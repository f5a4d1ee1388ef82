#include "rwre/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "rwre/rng.hpp"

namespace rwre {

namespace {

// walk-local cache of omega over [0, reach]; om[0] is unused (reflection)
struct OmegaCache {
    const Environment* env;
    std::vector<double> om;

    explicit OmegaCache(const Environment& e) : env(&e) { om.resize(64, 0.0); fill(1, 63); }

    void fill(int64_t lo, int64_t hi) {
        for (int64_t x = std::max<int64_t>(lo, 1); x <= hi; ++x)
            om[static_cast<size_t>(x)] = env->omega_at(x);
    }

    void ensure(int64_t x) {
        if (static_cast<size_t>(x) + 1 < om.size()) return;
        const size_t old = om.size();
        om.resize(static_cast<size_t>(x) * 2 + 64, 0.0);
        fill(static_cast<int64_t>(old), static_cast<int64_t>(om.size()) - 1);
    }
};

} // namespace

std::vector<uint64_t> default_probe_schedule(uint64_t n_steps) {
    std::vector<uint64_t> probes;
    for (int j = 0;; ++j) {
        const double p = std::round(std::pow(2.0, 0.5 * j));
        if (p >= static_cast<double>(n_steps)) break;
        const uint64_t n = static_cast<uint64_t>(p);
        if (probes.empty() || n > probes.back()) probes.push_back(n);
    }
    if (n_steps > 0) probes.push_back(n_steps);
    return probes;
}

TrajectorySummary run_walk(const Environment& env, const WalkConfig& cfg) {
    if (cfg.n_steps > cfg.step_cap)
        throw StepCapExceeded("n_steps exceeds step_cap");
    std::vector<uint64_t> probes =
        cfg.probe_schedule.empty() ? default_probe_schedule(cfg.n_steps) : cfg.probe_schedule;
    for (size_t i = 0; i < probes.size(); ++i) {
        if (probes[i] > cfg.n_steps || (i > 0 && probes[i] <= probes[i - 1]))
            throw std::invalid_argument("probe schedule must be strictly increasing and <= n_steps");
    }

    std::vector<int64_t> targets = cfg.hitting_targets;
    std::sort(targets.begin(), targets.end());
    for (int64_t t : targets)
        if (t < 1) throw std::invalid_argument("hitting targets must be >= 1");

    TrajectorySummary out;
    out.n_steps = cfg.n_steps;
    out.hits.reserve(targets.size());
    for (int64_t t : targets) out.hits.push_back({t, std::nullopt, {}});

    OmegaCache oc(env);
    SplitMix64 rng(derive_seed(cfg.walk_seed, cfg.replica));

    std::vector<uint64_t> lt(64, 0);
    lt[0] = 1;  // X_0 = 0 counted at j = 0
    int64_t pos = 0;
    int64_t max_pos = 0;
    uint64_t xi_star = 1;

    size_t next_probe = 0;
    size_t next_hit = 0;

    for (uint64_t j = 1; j <= cfg.n_steps; ++j) {
        if (pos == 0) {
            pos = 1;
        } else {
            const double u = rng.next_unit();
            pos += (u < oc.om[static_cast<size_t>(pos)]) ? 1 : -1;
        }
        if (pos > max_pos) {
            max_pos = pos;
            if (static_cast<size_t>(pos) + 1 >= lt.size()) lt.resize(lt.size() * 2, 0);
            oc.ensure(pos + 1);
        }
        const uint64_t c = ++lt[static_cast<size_t>(pos)];
        if (c > xi_star) xi_star = c;

        if (next_hit < targets.size() && pos == targets[next_hit]) {
            HitRecord& hr = out.hits[next_hit];
            hr.time = j;
            if (cfg.snapshot_on_hit)
                hr.local_times.assign(lt.begin(), lt.begin() + max_pos + 1);
            ++next_hit;
            if (cfg.stop_after_targets && next_hit == targets.size()) {
                out.n_steps = j;
                break;
            }
        }
        if (next_probe < probes.size() && j == probes[next_probe]) {
            ProbeRecord pr;
            pr.n = j;
            pr.xi_star = xi_star;
            pr.max_position = max_pos;
            pr.local_times.assign(lt.begin(), lt.begin() + max_pos + 1);
            out.probes.push_back(std::move(pr));
            ++next_probe;
        }
    }

    out.xi_star = xi_star;
    out.max_position = max_pos;
    out.final_position = pos;
    out.local_times.assign(lt.begin(), lt.begin() + max_pos + 1);
    if (cfg.n_steps == 0) {
        out.probes.push_back({0, 1, 0, {1}});
    }
    return out;
}

std::optional<uint64_t> first_hitting_time(const Environment& env, uint64_t walk_seed,
                                           int64_t x, uint64_t step_cap) {
    auto times = first_hitting_times(env, walk_seed, {x}, step_cap);
    return times[0];
}

std::vector<std::optional<uint64_t>> first_hitting_times(const Environment& env,
                                                         uint64_t walk_seed,
                                                         std::vector<int64_t> targets,
                                                         uint64_t step_cap) {
    std::sort(targets.begin(), targets.end());
    if (targets.empty() || targets.front() < 1)
        throw std::invalid_argument("hitting targets must be >= 1");

    std::vector<std::optional<uint64_t>> out(targets.size());
    OmegaCache oc(env);
    SplitMix64 rng(derive_seed(walk_seed, 0));
    int64_t pos = 0;
    size_t next = 0;
    for (uint64_t j = 1; j <= step_cap; ++j) {
        if (pos == 0) {
            pos = 1;
        } else {
            const double u = rng.next_unit();
            pos += (u < oc.om[static_cast<size_t>(pos)]) ? 1 : -1;
        }
        if (static_cast<size_t>(pos) + 2 >= oc.om.size()) oc.ensure(pos + 2);
        if (pos == targets[next]) {
            out[next] = j;
            if (++next == targets.size()) return out;
        }
    }
    return out;
}

ExcursionCensus excursion_census(const Environment& env, uint64_t walk_seed, int64_t b,
                                 const std::vector<int64_t>& sites, uint64_t n_excursions,
                                 uint64_t step_cap) {
    if (b < 1) throw std::invalid_argument("anchor must be >= 1");
    for (int64_t s : sites)
        if (s == b || s < 0)
            throw std::invalid_argument("census sites must be nonnegative and differ from the anchor");

    ExcursionCensus out;
    out.anchor = b;
    out.sites = sites;
    out.visits.reserve(n_excursions);
    out.durations.reserve(n_excursions);

    // dense site -> slot lookup over the hull of {b, sites}
    int64_t lo = b, hi = b;
    for (int64_t s : sites) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    std::vector<int32_t> slot(static_cast<size_t>(hi - lo + 1), -1);
    for (size_t s = 0; s < sites.size(); ++s)
        slot[static_cast<size_t>(sites[s] - lo)] = static_cast<int32_t>(s);

    OmegaCache oc(env);
    oc.ensure(hi + 2);
    SplitMix64 rng(derive_seed(walk_seed, 0));

    int64_t pos = b;
    std::vector<uint64_t> current(sites.size(), 0);
    uint64_t dur = 0;

    for (uint64_t j = 1; j <= step_cap; ++j) {
        if (pos == 0) {
            pos = 1;
        } else {
            const double u = rng.next_unit();
            pos += (u < oc.om[static_cast<size_t>(pos)]) ? 1 : -1;
        }
        if (static_cast<size_t>(pos) + 1 >= oc.om.size()) oc.ensure(pos + 1);
        ++dur;
        if (pos == b) {
            out.visits.push_back(current);
            out.durations.push_back(dur);
            ++out.completed;
            if (out.completed >= n_excursions) return out;
            std::fill(current.begin(), current.end(), 0);
            dur = 0;
        } else if (pos >= lo && pos <= hi) {
            const int32_t s = slot[static_cast<size_t>(pos - lo)];
            if (s >= 0) ++current[static_cast<size_t>(s)];
        }
    }
    throw StepCapExceeded("census step cap hit after " + std::to_string(out.completed) +
                          " excursions");
}

std::vector<std::optional<uint64_t>> sample_exit_times(const Environment& env,
                                                       uint64_t walk_seed, int64_t lo,
                                                       int64_t hi, int64_t start,
                                                       uint64_t n_samples,
                                                       uint64_t per_sample_cap) {
    if (!(lo < start && start < hi))
        throw std::invalid_argument("exit sampling requires lo < start < hi");
    OmegaCache oc(env);
    oc.ensure(hi + 1);

    std::vector<std::optional<uint64_t>> out;
    out.reserve(n_samples);
    for (uint64_t s = 0; s < n_samples; ++s) {
        SplitMix64 rng(derive_seed(walk_seed, s));
        int64_t pos = start;
        std::optional<uint64_t> tau;
        for (uint64_t j = 1; j <= per_sample_cap; ++j) {
            if (pos == 0) {
                pos = 1;
            } else {
                const double u = rng.next_unit();
                pos += (u < oc.om[static_cast<size_t>(pos)]) ? 1 : -1;
            }
            if (pos <= lo || pos >= hi) {
                tau = j;
                break;
            }
        }
        out.push_back(tau);
    }
    return out;
}

std::vector<uint64_t> occupation_by_valley(const std::vector<uint64_t>& local_times,
                                           const ValleyDecomposition& dec) {
    const int64_t max_site = static_cast<int64_t>(local_times.size()) - 1;
    // also guards against an unresolved next valley start inside the table
    (void)dec.seen_valleys(max_site);

    std::vector<uint64_t> counts(dec.valleys.size(), 0);
    size_t k = 0;
    for (int64_t x = 0; x <= max_site; ++x) {
        while (k + 1 < dec.valleys.size() && dec.valleys[k + 1].start <= x) ++k;
        counts[k] += local_times[static_cast<size_t>(x)];
    }
    return counts;
}

int64_t seen_valleys(const TrajectorySummary& summary, const ValleyDecomposition& dec) {
    return dec.seen_valleys(summary.max_position);
}

} // namespace rwre
