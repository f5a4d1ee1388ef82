#include <doctest.h>

#include <cmath>

#include "rwre/experiments.hpp"
#include "rwre/report.hpp"
#include "test_fixtures.hpp"

using namespace rwre;

TEST_CASE("localization fractions on forced occupation tables") {
    // hand-built occupation: valleys 0..4, total 101 steps -> n = 100
    const std::vector<uint64_t> L = {1, 2, 3, 25, 70};
    LocalizationPoint pt = localization_fractions(L, 4, 100);
    CHECK(pt.f2 == doctest::Approx((70.0 + 25.0) / 101.0));
    CHECK(pt.e == doctest::Approx((2.0 + 3.0) / 101.0));  // k = 1, 2

    // before m_2 exists only valleys 0 and 1: f2 = 1, e = 0
    const std::vector<uint64_t> L01 = {40, 61};
    LocalizationPoint early = localization_fractions(L01, 1, 100);
    CHECK(early.f2 == 1.0);
    CHECK(early.e == 0.0);

    LocalizationPoint lone = localization_fractions({101}, 0, 100);
    CHECK(lone.f2 == 1.0);
}

TEST_CASE("ratio statistics on a forced trajectory stub") {
    Environment env = test::hb_extended_env();
    ValleyDecomposition dec = decompose(env, 2.0, 22);
    REQUIRE(dec.valleys[1].complete);
    const Valley& v1 = dec.valleys[1];

    // walk that only ever sat at b_1 within valley 1: r2 = 1/Lambda_1
    std::vector<uint64_t> lt(static_cast<size_t>(dec.valleys[2].start) + 1, 0);
    lt[static_cast<size_t>(v1.bottom)] = 17;
    RatioPoint pt = ratio_statistics(lt, dec, 2);
    CHECK(pt.r2 == doctest::Approx(1.0 / v1.lambda));
    CHECK(pt.r1 == doctest::Approx(1.0 / v1.lambda));

    // spreading mass with the Boltzmann profile pushes r1, r2 toward 1
    std::vector<uint64_t> prof(static_cast<size_t>(dec.valleys[2].start) + 1, 0);
    for (int64_t x = v1.start; x < dec.valleys[2].start; ++x)
        prof[static_cast<size_t>(x)] = static_cast<uint64_t>(
            std::llround(1e6 * std::exp(-(env.potential(x) - v1.v_bottom))));
    RatioPoint pb = ratio_statistics(prof, dec, 2);
    CHECK(pb.r2 == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(pb.r1 == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("decompose_covering resolves pending starts") {
    EnvironmentSpec spec;
    spec.family = EnvFamily::TwoPoint;
    spec.a = 1.0;
    spec.seed = 2026;
    Environment env(spec);
    ValleyDecomposition dec = decompose_covering(env, 5.0, 50'000, false);
    CHECK_NOTHROW(dec.seen_valleys(50'000));
    CHECK(dec.horizon >= 100'000);
}

TEST_CASE("lambda tail study smoke") {
    LambdaTailConfig cfg;
    cfg.env.family = EnvFamily::TwoPoint;
    cfg.env.a = 1.0;
    cfg.rhos = {4.0, 8.0};
    cfg.n_samples = 1500;
    ExperimentReport rep = lambda_tail_study(cfg);
    CHECK(rep.study == "lambda_tail");
    // widths >= 1 and negative tail slopes even at smoke scale
    bool saw_floor = false;
    for (const auto& v : rep.verdicts) {
        if (v.criterion == "lambda_width_floor") {
            saw_floor = true;
            CHECK(v.pass);
        }
        if (v.criterion.find("lambda_tail_slope") == 0) CHECK(v.pass);
    }
    CHECK(saw_floor);

    // determinism: identical config reproduces identical bytes
    ExperimentReport rep2 = lambda_tail_study(cfg);
    CHECK(report_to_json(rep).dump() == report_to_json(rep2).dump());
}

TEST_CASE("height scaling study smoke") {
    HeightScalingConfig cfg;
    cfg.env.family = EnvFamily::TwoPoint;
    cfg.env.a = 1.0;
    cfg.slope_envs = 12;
    cfg.k_lo = 2;
    cfg.k_hi = 5;
    cfg.slope_site_cap = 5'000'000;
    cfg.ks_envs = 30;
    cfg.ks_k_min = 2;
    cfg.ks_k_max = 4;
    cfg.ks_site_cap = 5'000'000;
    cfg.min_ratio_samples = 30;
    cfg.ks_uniform_max = 1.0;  // smoke run: only wiring is under test
    cfg.ks_exp_max = 1.0;
    cfg.k0_sweep = {};
    ExperimentReport rep = height_scaling_study(cfg);
    double slope = 0.0, mono = -1.0;
    for (const auto& [k, v] : rep.scalars) {
        if (k == "slope") slope = v;
    }
    for (const auto& v : rep.verdicts)
        if (v.criterion == "height_monotone") mono = v.observed;
    CHECK(slope > 0.3);
    CHECK(mono == 0.0);  // exact monotonicity must hold at any scale
}

TEST_CASE("localization study smoke") {
    LocalizationConfig cfg;
    cfg.env.family = EnvFamily::TwoPoint;
    cfg.env.a = 1.0;
    cfg.k0 = 2.0;
    cfg.n_seeds = 6;
    cfg.n_steps = 400'000;
    ExperimentReport rep = localization_study(cfg);
    REQUIRE(!rep.series.empty());
    // f2 is a fraction in [0,1] at every probe
    for (double y : rep.series[0].ys) {
        CHECK(y >= 0.0);
        CHECK(y <= 1.0 + 1e-12);
    }
    ExperimentReport rep2 = localization_study(cfg);
    CHECK(report_to_json(rep).dump() == report_to_json(rep2).dump());
}

TEST_CASE("ratio study smoke") {
    RatioConfig cfg;
    cfg.env.family = EnvFamily::TwoPoint;
    cfg.env.a = 1.0;
    cfg.n_seeds = 10;
    cfg.n_min = 2;
    cfg.n_max = 3;
    cfg.step_cap = 50'000'000;
    cfg.site_cap = 10'000'000;
    ExperimentReport rep = ratio_study(cfg);
    double pairs = 0.0;
    for (const auto& [k, v] : rep.scalars)
        if (k == "n_pairs") pairs = v;
    CHECK(pairs >= 1.0);
    for (const auto& s : rep.series)
        if (s.name == "r1")
            for (double r : s.ys) CHECK(r > 0.0);
}

TEST_CASE("hitting scaling study smoke") {
    HittingScalingConfig cfg;
    cfg.env.family = EnvFamily::TwoPoint;
    cfg.env.a = 1.0;
    cfg.n_seeds = 8;
    cfg.targets = {40, 60};
    cfg.step_cap = 100'000'000;
    cfg.band_lo = 0.0;  // smoke run checks wiring, not the asymptotic band
    cfg.band_hi = 1.0;
    ExperimentReport rep = hitting_scaling_study(cfg);
    for (const auto& v : rep.verdicts) CHECK(v.pass);
}

TEST_CASE("exit tail study smoke") {
    ExitTailConfig cfg;
    cfg.env.family = EnvFamily::TwoPoint;
    cfg.env.a = 1.0;
    cfg.n_envs = 4;
    cfg.ks = {1, 2};
    cfg.n_restarts = 300;
    cfg.per_restart_cap = 20'000;
    cfg.site_cap = 5'000'000;
    ExperimentReport rep = exit_tail_study(cfg);
    // envelopes are positive wherever defined
    for (const auto& s : rep.series)
        for (double y : s.ys) CHECK(y > 0.0);
}

TEST_CASE("liminf trace smoke") {
    LiminfConfig cfg;
    cfg.env.family = EnvFamily::TwoPoint;
    cfg.env.a = 1.0;
    cfg.k0 = 2.0;
    cfg.n_seeds = 4;
    cfg.n_steps = 300'000;
    cfg.probe_floor = 100;
    ExperimentReport rep = liminf_trace(cfg);
    double smin = -1.0;
    for (const auto& [k, v] : rep.scalars)
        if (k == "s_min") smin = v;
    CHECK(smin > 0.0);
}
