#pragma once
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

struct BadOrdering : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct WindowTooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct Singular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quenched excursion-law parameters for visits to x in one excursion from b:
//   alpha = P(T(x) < T(b) | X_0 = b),  beta = P(T(b) < T(x) | X_0 = x)
// Visit counts are almost geometric: P(Y=0) = 1-alpha,
// P(Y=m) = alpha (1-beta)^{m-1} beta for m >= 1, and E Y = alpha/beta.
struct ExcursionLawParams {
    double alpha = 0.0;
    double beta = 0.0;
};

// P(T(b) < T(i) | X_0 = x) = sum_{j=x}^{i-1} e^{V(j)} / sum_{j=b}^{i-1} e^{V(j)},
// log-sum-exp evaluated. Requires 0 <= b <= x < i (x = b returns 1).
double hit_before_prob(const Environment& env, int64_t b, int64_t x, int64_t i);

// mu(x)/mu(b); also equals (omega_b/omega_x) e^{-[V(x)-V(b)]}
double excursion_visit_mean(const Environment& env, int64_t b, int64_t x);

ExcursionLawParams excursion_visit_params(const Environment& env, int64_t b, int64_t x);

double excursion_visit_pmf(const ExcursionLawParams& params, int64_t m);

// alpha (2 - beta - alpha) / beta^2
double excursion_visit_variance(const Environment& env, int64_t b, int64_t x);

// log of  x^2 exp( max_{0<=i<=j<x} (V(j)-V(i)) )
double golosov_bound_log(const Environment& env, int64_t x);
double golosov_bound(const Environment& env, int64_t x);

// p(b,i) = omega_b P(T(i) < T(b) | X_0 = b+1) = omega_b e^{V(b)} / sum_{y=b}^{i-1} e^{V(y)};
// the number of completed excursions from b before T(i) is geometric(p).
double escape_parameter(const Environment& env, int64_t b, int64_t i);

enum class OracleMode { HitProbs, OccupationBefore };

// Ground truth from the tridiagonal harmonic/occupation equations on a
// finite window; works entirely in probability space, so it is independent
// of the e^V route and safe at any potential depth.
struct OracleResult {
    int64_t left = 0;
    int64_t right = 0;
    // HitProbs: absorption probabilities indexed by start site left..right
    std::vector<double> absorb_right;
    std::vector<double> absorb_left;
    // OccupationBefore: expected visits to each transient site before
    // absorption, from the given start; expected_total is their sum, i.e.
    // the expected absorption time
    std::vector<double> occupation;
    int64_t start = 0;
    double expected_total = 0.0;
    double residual = 0.0;  // max residual of the solves, relative
};

// HitProbs: both window ends absorbing.
// OccupationBefore: right end absorbing; site 0 reflecting (forced step to 1)
// when left == 0, otherwise the left end is absorbing too.
// Window size is capped at 10^4 sites.
OracleResult solve_finite_chain(const Environment& env, int64_t left, int64_t right,
                                OracleMode mode, int64_t start = 0);

} // namespace rwre
