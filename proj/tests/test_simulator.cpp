#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rwre/chain_analytics.hpp"
#include "rwre/simulator.hpp"
#include "rwre/stats.hpp"
#include "test_fixtures.hpp"

using namespace rwre;

namespace {

uint64_t table_sum(const std::vector<uint64_t>& lt) {
    return std::accumulate(lt.begin(), lt.end(), uint64_t{0});
}

} // namespace

TEST_CASE("walk start and reflection") {
    Environment hb = test::hb_env();
    WalkConfig cfg;
    cfg.n_steps = 0;
    TrajectorySummary s0 = run_walk(hb, cfg);
    CHECK(s0.local_times[0] == 1);
    CHECK(s0.xi_star == 1);
    CHECK(s0.probes.back().n == 0);

    cfg.n_steps = 1;
    TrajectorySummary s1 = run_walk(hb, cfg);
    CHECK(s1.final_position == 1);  // forced step
    CHECK(s1.local_times[0] == 1);
    CHECK(s1.local_times[1] == 1);
}

TEST_CASE("counting identity at every probe") {
    EnvironmentSpec spec;
    spec.family = EnvFamily::TwoPoint;
    spec.a = 1.0;
    spec.seed = 99;
    Environment env(spec);
    WalkConfig cfg;
    cfg.walk_seed = 5;
    cfg.n_steps = 2'000'000;
    TrajectorySummary sum = run_walk(env, cfg);
    for (const auto& pr : sum.probes) {
        CHECK(table_sum(pr.local_times) == pr.n + 1);
        CHECK(*std::max_element(pr.local_times.begin(), pr.local_times.end()) == pr.xi_star);
    }
    CHECK(table_sum(sum.local_times) == cfg.n_steps + 1);

    // local times are monotone across probes
    for (size_t p = 1; p < sum.probes.size(); ++p) {
        const auto& a = sum.probes[p - 1].local_times;
        const auto& b = sum.probes[p].local_times;
        REQUIRE(b.size() >= a.size());
        for (size_t x = 0; x < a.size(); ++x) CHECK(a[x] <= b[x]);
    }
}

TEST_CASE("steps move by one site") {
    // with a probe at every step, exactly one local time grows per step and
    // consecutive growth sites are unit neighbors (or the reflection 0 -> 1)
    Environment hb = test::hb_env();
    WalkConfig cfg;
    cfg.walk_seed = 17;
    cfg.n_steps = 64;
    cfg.probe_schedule.resize(64);
    for (uint64_t j = 0; j < 64; ++j) cfg.probe_schedule[j] = j + 1;
    TrajectorySummary sum = run_walk(hb, cfg);
    int64_t prev = 0;
    std::vector<uint64_t> last{1};
    for (const auto& pr : sum.probes) {
        uint64_t grew = 0;
        int64_t where = -1;
        for (size_t x = 0; x < pr.local_times.size(); ++x) {
            const uint64_t old = x < last.size() ? last[x] : 0;
            if (pr.local_times[x] != old) {
                grew += pr.local_times[x] - old;
                where = static_cast<int64_t>(x);
            }
        }
        CHECK(grew == 1);
        CHECK((std::llabs(where - prev) == 1 || (prev == 0 && where == 1)));
        prev = where;
        last = pr.local_times;
    }
}

TEST_CASE("determinism of summaries") {
    EnvironmentSpec spec;
    spec.family = EnvFamily::UniformSymmetric;
    spec.delta = 0.2;
    spec.seed = 1;
    Environment env(spec);
    WalkConfig cfg;
    cfg.walk_seed = 1234;
    cfg.n_steps = 500'000;
    cfg.hitting_targets = {5, 25};
    TrajectorySummary a = run_walk(env, cfg);
    TrajectorySummary b = run_walk(env, cfg);
    CHECK(a.final_position == b.final_position);
    CHECK(a.xi_star == b.xi_star);
    CHECK(a.local_times == b.local_times);
    REQUIRE(a.probes.size() == b.probes.size());
    for (size_t p = 0; p < a.probes.size(); ++p)
        CHECK(a.probes[p].local_times == b.probes[p].local_times);
    for (size_t t = 0; t < a.hits.size(); ++t) CHECK(a.hits[t].time == b.hits[t].time);
}

TEST_CASE("first hitting times") {
    Environment flat = test::flat_env(64);
    // T(1) = 1 by the forced first step
    for (uint64_t s = 0; s < 5; ++s) CHECK(first_hitting_time(flat, s, 1, 100) == 1);

    // T(x) >= x
    for (uint64_t s = 0; s < 20; ++s) {
        auto t = first_hitting_time(flat, s, 12, 1'000'000);
        REQUIRE(t.has_value());
        CHECK(*t >= 12);
        CHECK((*t - 12) % 2 == 0);  // parity away from the boundary
    }

    // censoring
    CHECK_FALSE(first_hitting_time(flat, 3, 40, 10).has_value());

    // reflected simple walk: E T(10) = 100 (oracle value), mean over 10^4 runs
    // within 3 standard errors
    std::vector<double> ts;
    for (uint64_t s = 0; s < 10'000; ++s)
        ts.push_back(static_cast<double>(*first_hitting_time(flat, s, 10, 1'000'000)));
    const double mean = stats::mean(ts);
    const double se = stats::std_error(ts);
    CHECK(std::abs(mean - 100.0) <= 3.0 * se);
}

TEST_CASE("excursion census matches the quenched law") {
    Environment hb = test::hb_env();
    const int64_t b = 2, x = 4;
    ExcursionCensus census = excursion_census(hb, 2024, b, {x}, 100'000);
    REQUIRE(census.completed == 100'000);

    for (uint64_t d : census.durations) CHECK(d >= 2);

    std::vector<double> ys;
    uint64_t zeros = 0;
    for (const auto& v : census.visits) {
        ys.push_back(static_cast<double>(v[0]));
        if (v[0] == 0) ++zeros;
    }
    // sample mean within 3 SE of mu(x)/mu(b) = e^{-1}
    const double target = excursion_visit_mean(hb, b, x);
    CHECK(std::abs(stats::mean(ys) - target) <= 3.0 * stats::std_error(ys));

    // P(Y=0) within 3 SE of 1 - alpha
    const ExcursionLawParams p = excursion_visit_params(hb, b, x);
    const double p0 = static_cast<double>(zeros) / static_cast<double>(census.completed);
    const double se0 = std::sqrt(p0 * (1 - p0) / static_cast<double>(census.completed));
    CHECK(std::abs(p0 - (1.0 - p.alpha)) <= 3.0 * se0);

    // split-half distribution stability (strong Markov property)
    std::vector<double> first(ys.begin(), ys.begin() + 50'000);
    std::vector<double> second(ys.begin() + 50'000, ys.end());
    CHECK(stats::ks_two_sample(first, second) <= 0.02);

    CHECK_THROWS_AS(excursion_census(hb, 1, b, {b}, 10), std::invalid_argument);
}

TEST_CASE("excursion count before escape is geometric") {
    Environment hb = test::hb_env();
    const int64_t b = 2, i = 7;
    const double p = escape_parameter(hb, b, i);
    // number of completed excursions from b before T(i): mean (1-p)/p
    std::vector<double> counts;
    for (uint64_t s = 0; s < 10'000; ++s) {
        SplitMix64 rng(derive_seed(s, 99));
        int64_t pos = b;
        uint64_t n_exc = 0;
        for (;;) {
            if (pos == 0) {
                pos = 1;
            } else {
                pos += rng.next_unit() < hb.omega_at(pos) ? 1 : -1;
            }
            if (pos == b) ++n_exc;
            if (pos == i) break;
        }
        counts.push_back(static_cast<double>(n_exc));
    }
    const double target = (1.0 - p) / p;
    CHECK(std::abs(stats::mean(counts) - target) <= 3.0 * stats::std_error(counts));
}

TEST_CASE("exit time sampling") {
    Environment env = test::hb_extended_env();
    ValleyDecomposition dec = decompose(env, 2.0, 22);
    const Valley& v1 = dec.valleys[1];
    auto taus = sample_exit_times(env, 7, v1.start, dec.valleys[2].start, v1.bottom, 2000,
                                  1'000'000);
    REQUIRE(taus.size() == 2000);
    for (const auto& t : taus) {
        REQUIRE(t.has_value());
        // the bottom sits 5 sites from m_1 and 5 from m_2
        CHECK(*t >= 5);
    }

    // empirical P(tau < m) is nondecreasing in m; spot-check
    auto count_below = [&](uint64_t m) {
        uint64_t c = 0;
        for (const auto& t : taus)
            if (t && *t < m) ++c;
        return c;
    };
    CHECK(count_below(10) <= count_below(100));
    CHECK(count_below(100) <= count_below(10'000));
}

TEST_CASE("occupation by valley partitions time") {
    Environment env = test::hb_extended_env();
    WalkConfig cfg;
    cfg.walk_seed = 31;
    cfg.n_steps = 200'000;
    TrajectorySummary sum = run_walk(env, cfg);
    ValleyDecomposition dec = decompose(env, 2.0, std::max<int64_t>(4 * sum.max_position, 64));

    const std::vector<uint64_t> L = occupation_by_valley(sum.local_times, dec);
    CHECK(std::accumulate(L.begin(), L.end(), uint64_t{0}) == cfg.n_steps + 1);

    // direct recount over the table
    std::vector<uint64_t> direct(dec.valleys.size(), 0);
    for (size_t x = 0; x < sum.local_times.size(); ++x)
        direct[static_cast<size_t>(dec.valley_of_site(static_cast<int64_t>(x)))] +=
            sum.local_times[x];
    CHECK(L == direct);

    // a walk kept below m_1 spends everything in valley 0
    WalkConfig tiny;
    tiny.walk_seed = 31;
    tiny.n_steps = 5;
    TrajectorySummary short_sum = run_walk(env, tiny);
    REQUIRE(short_sum.max_position < dec.valleys[1].start);
    const std::vector<uint64_t> L0 = occupation_by_valley(short_sum.local_times, dec);
    CHECK(L0[0] == 6);
    for (size_t k = 1; k < L0.size(); ++k) CHECK(L0[k] == 0);
}

TEST_CASE("seen valleys from a summary") {
    Environment env = test::hb_extended_env();
    ValleyDecomposition dec = decompose(env, 2.0, 22);
    TrajectorySummary sum;
    sum.max_position = 3;
    CHECK(seen_valleys(sum, dec) == 0);
    sum.max_position = 16;  // exactly m_2
    CHECK(seen_valleys(sum, dec) == 2);
}

TEST_CASE("snapshot on hit and early stop") {
    EnvironmentSpec spec;
    spec.family = EnvFamily::TwoPoint;
    spec.a = 1.0;
    spec.seed = 7;
    Environment env(spec);
    WalkConfig cfg;
    cfg.walk_seed = 2;
    cfg.n_steps = 10'000'000;
    cfg.hitting_targets = {3, 9};
    cfg.snapshot_on_hit = true;
    cfg.stop_after_targets = true;
    TrajectorySummary sum = run_walk(env, cfg);
    REQUIRE(sum.hits.size() == 2);
    for (const auto& hr : sum.hits) {
        REQUIRE(hr.time.has_value());
        CHECK(table_sum(hr.local_times) == *hr.time + 1);
    }
    CHECK(*sum.hits[1].time == sum.n_steps);  // stopped right at the last hit
    CHECK(sum.final_position == 9);
}
