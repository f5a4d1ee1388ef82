#include "rwre/valleys.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/rng.hpp"

namespace rwre {

namespace {

// Per-site terms this far below the running maximum cannot move the width
// sum by 1e-9 relative over any feasible span, so the exp() is skipped in
// the hot scan.
constexpr double kWidthSkip = 45.0;

inline void add_width_term(LogSumExp& acc, double a) {
    if (acc.empty() || a > acc.max_exponent() - kWidthSkip) acc.add(a);
}

// Potential arithmetic policies. The scan is written once against this
// interface; TwoPoint environments without a forced prefix use exact
// integer lattice arithmetic (V = a * count), everything else plain doubles.

struct DoublePotential {
    using Value = double;
    const Environment* env;
    double v = 0.0;

    explicit DoublePotential(const Environment& e) : env(&e) {}
    Value advance(int64_t i) { return v += env->log_rho(i); }
    double to_potential(Value x) const { return x; }
    Value zero() const { return 0.0; }
    Value k0_threshold(double k0) const { return k0; }
    static constexpr Value neg_inf() { return -std::numeric_limits<double>::infinity(); }
    static constexpr Value pos_inf() { return std::numeric_limits<double>::infinity(); }
};

struct LatticePotential {
    using Value = int64_t;
    uint64_t seed;
    double a;
    int64_t v = 0;

    LatticePotential(const Environment& e)
        : seed(e.spec().seed), a(e.spec().a) {}
    Value advance(int64_t i) {
        return v += (mix64(seed ^ static_cast<uint64_t>(i)) >> 63) ? 1 : -1;
    }
    double to_potential(Value x) const { return a * static_cast<double>(x); }
    Value zero() const { return 0; }
    Value k0_threshold(double k0) const {
        return static_cast<int64_t>(std::ceil(k0 / a));
    }
    static constexpr Value neg_inf() { return std::numeric_limits<int64_t>::min() / 2; }
    static constexpr Value pos_inf() { return std::numeric_limits<int64_t>::max() / 2; }
};

template <typename P>
ValleyDecomposition scan(const Environment& env, double k0, int64_t horizon,
                         const ScanOptions& opts) {
    using V = typename P::Value;

    ValleyDecomposition dec;
    dec.k0 = k0;
    dec.horizon = horizon;

    const bool widths = opts.want_widths;
    P pot(env);

    Valley first;
    first.k = 0;
    first.start = 0;  // valley 0 spans [0, m_1) by construction
    first.theta = 0;
    dec.valleys.push_back(first);

    enum class Phase { SeekEta, SeekTheta };
    Phase phase = Phase::SeekEta;

    V v = pot.zero();
    V vmin = pot.zero();              // running min; equals min over [theta_k, i] in SeekEta
    int64_t bcand = 0;                // last argmin
    V threshold = pot.k0_threshold(k0);  // eta trigger: v - vmin >= threshold
    V closed_max = pot.zero();        // max of V over [eta_{k-1}, theta_k], set at theta
    V cur_bottom = pot.zero();        // V(b_k) of the current valley once eta was seen

    LogSumExp acc;                    // width terms of the current valley's known span
    V span_min = pot.zero();          // min of V over that span
    if (widths) acc.add(0.0);

    // barrier bookkeeping while seeking the closing theta
    V v_at_eta = pot.zero();
    V mval = pot.zero();              // max of V over (eta_k, i]
    int64_t mpos = -1;                // first argmax of that window
    LogSumExp cand;                   // width terms of [mpos, i]; owned by the next valley
    V cand_min = pot.zero();

    bool early_stop = false;

    for (int64_t i = 1; i <= horizon && !early_stop; ++i) {
        v = pot.advance(i);

        if (phase == Phase::SeekEta) {
            if (widths) add_width_term(acc, -pot.to_potential(v));
            if (v < span_min) span_min = v;
            if (v <= vmin) {
                vmin = v;
                bcand = i;
            } else if (v - vmin >= threshold) {
                Valley& vk = dec.valleys.back();
                vk.eta = i;
                vk.bottom = bcand;
                cur_bottom = vmin;
                vk.v_bottom = pot.to_potential(vmin);
                if (vk.k >= 1) vk.h_minus = pot.to_potential(closed_max - vmin);
                phase = Phase::SeekTheta;
                v_at_eta = v;
                mval = P::neg_inf();
                mpos = -1;
                cand.reset();
                cand_min = P::pos_inf();
            }
        } else {
            if (v > mval) {
                // new barrier maximum: the candidate span flows back into
                // the current valley
                if (widths) {
                    acc.merge(cand);
                    cand.reset();
                }
                if (cand_min < span_min) span_min = cand_min;
                cand_min = P::pos_inf();
                mval = v;
                mpos = i;

                Valley& vk = dec.valleys.back();
                if (!vk.h_known && vk.k >= 1 &&
                    pot.to_potential(mval - cur_bottom) >= vk.h_minus) {
                    // the right barrier already tops h_minus, so the min is
                    // settled now whatever H_k^+ ends up being
                    vk.h = vk.h_minus;
                    vk.h_known = true;
                    if (opts.stop_after_h_known >= 0 && vk.k >= opts.stop_after_h_known) {
                        dec.horizon = i;
                        early_stop = true;
                        break;
                    }
                }
            }
            if (widths) add_width_term(cand, -pot.to_potential(v));
            if (v < cand_min) cand_min = v;

            if (v <= cur_bottom) {
                // theta_{k+1}: close valley k, open valley k+1 at m_{k+1}
                Valley& vk = dec.valleys.back();
                closed_max = std::max(v_at_eta, mval);
                vk.h_plus = pot.to_potential(closed_max - cur_bottom);
                vk.h = vk.k == 0 ? vk.h_plus : std::min(vk.h_minus, vk.h_plus);
                vk.h_known = true;
                if (widths) vk.lambda = acc.sum_shifted(-vk.v_bottom);
                vk.v_min_span = pot.to_potential(span_min);
                vk.complete = true;

                Valley next;
                next.k = vk.k + 1;
                next.start = mpos;
                next.theta = i;
                dec.valleys.push_back(next);

                if (opts.stop_after_complete > 0 && next.k >= opts.stop_after_complete) {
                    dec.horizon = i;
                    early_stop = true;
                    break;
                }

                if (widths) {
                    acc = cand;
                    cand.reset();
                }
                span_min = cand_min;

                threshold = closed_max - cur_bottom;
                vmin = v;
                bcand = i;
                phase = Phase::SeekEta;
            }
        }
    }

    if (dec.valleys[0].eta < 0)
        throw HorizonTooSmall("eta_0 not reached by horizon " + std::to_string(horizon));

    if (!early_stop && phase == Phase::SeekTheta) dec.pending_start_candidate = mpos;

    return dec;
}

bool lattice_eligible(const Environment& env) {
    return env.spec().family == EnvFamily::TwoPoint && !env.has_forced_prefix();
}

} // namespace

int64_t ValleyDecomposition::valley_of_site(int64_t x) const {
    if (x < 0 || x > horizon)
        throw BeyondHorizon("site " + std::to_string(x) + " outside scanned range");
    // valley starts are increasing; find the last start <= x
    int64_t lo = 0, hi = static_cast<int64_t>(valleys.size()) - 1;
    while (lo < hi) {
        int64_t mid = (lo + hi + 1) / 2;
        if (valleys[static_cast<size_t>(mid)].start <= x)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

int64_t ValleyDecomposition::num_complete() const {
    int64_t n = 0;
    for (const auto& v : valleys)
        if (v.complete) ++n;
    return n;
}

int64_t ValleyDecomposition::seen_valleys(int64_t max_position) const {
    if (max_position > horizon)
        throw HorizonTooSmall("max position beyond decomposition horizon");
    if (pending_start_candidate >= 0 && pending_start_candidate <= max_position)
        throw HorizonTooSmall("horizon too small to pin the next valley start");
    int64_t n = 0;
    for (const auto& v : valleys)
        if (v.k >= 1 && v.start >= 0 && v.start <= max_position) n = v.k;
    return n;
}

ValleyDecomposition decompose(const Environment& env, double k0, int64_t horizon,
                              ScanOptions opts) {
    if (!(k0 > 0.0)) throw InvalidSpec("decompose: K_0 must be positive");
    if (horizon < 1) throw InvalidSpec("decompose: horizon must be >= 1");
    if (lattice_eligible(env)) return scan<LatticePotential>(env, k0, horizon, opts);
    return scan<DoublePotential>(env, k0, horizon, opts);
}

double effective_width(const Environment& env, const ValleyDecomposition& dec, int64_t k) {
    if (k < 0 || static_cast<size_t>(k) >= dec.valleys.size())
        throw IncompleteValley("no valley with index " + std::to_string(k));
    const Valley& vk = dec.valleys[static_cast<size_t>(k)];
    if (!vk.complete)
        throw IncompleteValley("valley " + std::to_string(k) + " incomplete: m_{k+1} unknown");
    const int64_t end = dec.valleys[static_cast<size_t>(k + 1)].start;

    double v = 0.0;
    double vb = 0.0;
    LogSumExp lse;
    if (vk.start == 0) lse.add(0.0);
    for (int64_t i = 1; i < end; ++i) {
        v += env.log_rho(i);
        if (i < vk.start) continue;
        if (i == vk.bottom) vb = v;
        lse.add(-v);
    }
    return lse.sum_shifted(-vb);
}

DepthStats depth_diagnostics(const Environment& env, const ValleyDecomposition& dec,
                             int64_t k) {
    if (k < 0 || static_cast<size_t>(k) >= dec.valleys.size())
        throw IncompleteValley("no valley with index " + std::to_string(k));
    const Valley& vk = dec.valleys[static_cast<size_t>(k)];
    if (!vk.complete)
        throw IncompleteValley("valley " + std::to_string(k) + " incomplete: m_{k+1} unknown");
    const int64_t end = dec.valleys[static_cast<size_t>(k + 1)].start;

    DepthStats out;
    double rise_min = 0.0, fall_max = 0.0, fall_max_eta = 0.0, tail_min = 0.0;
    bool tail_seen = false;

    auto process = [&](int64_t site, double v) {
        if (site == vk.start) rise_min = v;
        if (site < vk.bottom) {
            if (v < rise_min) rise_min = v;
            out.max_rise_before_bottom =
                std::max(out.max_rise_before_bottom, v - rise_min);
        }
        if (site == vk.bottom) fall_max = fall_max_eta = v;
        if (site >= vk.bottom) {
            if (v > fall_max) fall_max = v;
            out.max_fall_after_bottom =
                std::max(out.max_fall_after_bottom, fall_max - v);
            if (site < vk.eta) {
                if (v > fall_max_eta) fall_max_eta = v;
                out.max_fall_to_eta = std::max(out.max_fall_to_eta, fall_max_eta - v);
            } else {
                tail_min = tail_seen ? std::min(tail_min, v) : v;
                tail_seen = true;
            }
        }
    };

    double v = 0.0;
    if (vk.start == 0) process(0, 0.0);
    for (int64_t i = 1; i < end; ++i) {
        v += env.log_rho(i);
        if (i >= vk.start) process(i, v);
    }
    out.min_tail_above_bottom = tail_seen ? tail_min - vk.v_bottom : 0.0;
    return out;
}

RhoValley rho_valley(const Environment& env, double rho, int64_t scan_cap) {
    if (!(rho > 0.0)) throw InvalidSpec("rho_valley: rho must be positive");

    double v = 0.0, vmin = 0.0;
    int64_t bcand = 0;
    LogSumExp lse;
    lse.add(0.0);  // site 0 term
    for (int64_t i = 1; i <= scan_cap; ++i) {
        v += env.log_rho(i);
        if (v <= vmin) {
            vmin = v;
            bcand = i;
        } else if (v - vmin >= rho) {
            RhoValley out;
            out.bottom = bcand;
            out.eta = i;
            out.width = lse.sum_shifted(-vmin);  // sites 0..eta-1 only
            return out;
        }
        add_width_term(lse, -v);
    }
    throw ScanCapExceeded("eta(rho) not found within " + std::to_string(scan_cap) + " sites");
}

} // namespace rwre
