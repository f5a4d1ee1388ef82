#pragma once
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

struct HorizonTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IncompleteValley : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BeyondHorizon : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScanCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One record of the valley decomposition. Valley k occupies sites
// [start, start of valley k+1). Valley 0 is synthetic: its span begins at
// site 0 so that occupation accounting partitions Z_+; it has no left
// barrier (h_minus is NaN).
//
// Fields still unknown at the scan horizon are NaN (heights, lambda) or -1
// (sites); `complete` is true once the closing theta_{k+1} was observed,
// which pins the start of valley k+1 and every statistic of valley k.
struct Valley {
    int64_t k = 0;
    int64_t start = -1;   // m_k (0 for k = 0)
    int64_t theta = -1;   // theta_k
    int64_t bottom = -1;  // b_k, last argmin of V on [theta_k, eta_k]
    int64_t eta = -1;     // eta_k
    double h_minus = std::numeric_limits<double>::quiet_NaN();
    double h_plus = std::numeric_limits<double>::quiet_NaN();
    double h = std::numeric_limits<double>::quiet_NaN();  // min(h_minus, h_plus)
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double v_bottom = std::numeric_limits<double>::quiet_NaN();   // V(b_k)
    double v_min_span = std::numeric_limits<double>::quiet_NaN(); // min V over the span
    bool complete = false;
    // h is pinned as soon as the barrier past eta_k rises above h_minus
    // (the min is then h_minus whatever H_k^+ turns out to be), possibly
    // long before the valley completes
    bool h_known = false;
};

class ValleyDecomposition {
public:
    double k0 = 0.0;
    int64_t horizon = 0;
    std::vector<Valley> valleys;

    // Running candidate for the next valley start when the scan ended while
    // still descending toward the closing theta; -1 when not applicable.
    // Sites at or beyond this candidate cannot be assigned a final N_n.
    int64_t pending_start_candidate = -1;

    // index of the valley whose span [m_k, m_{k+1}) contains x; the last
    // started valley absorbs everything scanned past its start
    int64_t valley_of_site(int64_t x) const;

    int64_t num_complete() const;

    // N_n of the paper: largest k >= 1 with m_k <= max_position, 0 if the
    // walk never reached m_1. Requires max_position <= horizon.
    int64_t seen_valleys(int64_t max_position) const;
};

struct ScanOptions {
    bool want_widths = true;          // accumulate lambda during the scan
    int64_t stop_after_complete = 0;  // stop early once this many valleys closed (0 = no limit)
    int64_t stop_after_h_known = -1;  // stop once H_k of this valley index is pinned
};

// Forward pass over V emitting eta_0, b_0, then for k >= 1 the records
// (theta_k, H_{k-1}^+, eta_k, b_k, H_k^-, m_k). Tie rules: b_k is the last
// argmin, m_k the first argmax. The argmax window for m_k is taken over
// (eta_{k-1}, theta_k]; whenever the closed-window maximum is attained after
// eta_{k-1} (the generic case) this is the literal first argmax of
// [eta_{k-1}, theta_k]. Heights always use the closed window.
ValleyDecomposition decompose(const Environment& env, double k0, int64_t horizon,
                              ScanOptions opts = {});

// Lambda_k = sum_{i=m_k}^{m_{k+1}-1} e^{-[V(i)-V(b_k)]}, recomputed from the
// environment with a full log-sum-exp pass (independent of the in-scan
// streaming accumulation). IncompleteValley if m_{k+1} is unknown.
double effective_width(const Environment& env, const ValleyDecomposition& dec, int64_t k);

// The four window extremes controlling valley depth, for a complete valley:
//   max_rise_before_bottom: max of V(z)-V(y) over m_k <= y <= z < b_k
//   max_fall_after_bottom:  max of V(y)-V(z) over b_k <= y <= z < m_{k+1}
//   min_tail_above_bottom:  min of V over [eta_k, m_{k+1}) minus V(b_k)
//   max_fall_to_eta:        max of V(y)-V(z) over b_k <= y <= z < eta_k
struct DepthStats {
    double max_rise_before_bottom = 0.0;
    double max_fall_after_bottom = 0.0;
    double min_tail_above_bottom = 0.0;
    double max_fall_to_eta = 0.0;
};

DepthStats depth_diagnostics(const Environment& env, const ValleyDecomposition& dec, int64_t k);

// Standalone first-passage valley on a fresh environment stream:
//   eta(rho) = inf{ i > 0 : V(i) - min_{0<=j<=i} V(j) >= rho }
//   b(rho)   = last argmin of V on [0, eta(rho)]
//   width    = sum_{i=0}^{eta-1} e^{-[V(i)-V(b)]}
struct RhoValley {
    int64_t bottom = 0;
    int64_t eta = 0;
    double width = 0.0;
};

RhoValley rho_valley(const Environment& env, double rho,
                     int64_t scan_cap = 10'000'000'000LL);

} // namespace rwre
