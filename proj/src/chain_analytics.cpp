#include "rwre/chain_analytics.hpp"

#include <algorithm>
#include <cmath>

#include <gmpxx.h>

namespace rwre {

namespace {

// log of sum_{j=lo}^{hi} e^{V(j)}, one streaming pass
double log_sum_exp_potential(const Environment& env, int64_t lo, int64_t hi) {
    LogSumExp lse;
    double v = 0.0;
    if (lo == 0) lse.add(0.0);
    for (int64_t j = 1; j <= hi; ++j) {
        v += env.log_rho(j);
        if (j >= lo) lse.add(v);
    }
    return lse.log_sum();
}

// Tridiagonal solve with partial pivoting in exact rational arithmetic: the
// absorption system is nearly decomposable across deep barriers (condition
// number ~ e^{barrier}), so no floating-point solve can honor the 1e-10
// ground-truth contract. Callers build the coefficients as exact rationals
// (transition pairs must sum to exactly 1, or the solved chain leaks mass
// and the leak is amplified by e^{barrier}); the one rounding happens on
// output. The reported residual is recomputed in double from the rounded
// solution.
std::vector<double> tridiag_solve(std::vector<mpq_class> dl, std::vector<mpq_class> d,
                                  std::vector<mpq_class> du, std::vector<mpq_class> b,
                                  double* residual) {
    const size_t n = d.size();
    const std::vector<mpq_class> dl0 = dl, d0 = d, du0 = du, b0 = b;
    std::vector<mpq_class> du2(n > 2 ? n - 2 : 0, mpq_class(0));

    for (size_t i = 0; i + 1 < n; ++i) {
        if (abs(d[i]) >= abs(dl[i])) {
            if (d[i] == 0) throw Singular("zero pivot in tridiagonal solve");
            const mpq_class fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            if (i + 2 < n) du2[i] = 0;
        } else {
            const mpq_class fact = d[i] / dl[i];
            d[i] = dl[i];
            const mpq_class temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            std::swap(b[i], b[i + 1]);
            b[i + 1] -= fact * b[i];
        }
    }
    if (d[n - 1] == 0) throw Singular("zero pivot in tridiagonal solve");

    std::vector<mpq_class> x(n);
    x[n - 1] = b[n - 1] / d[n - 1];
    if (n >= 2) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (size_t ii = n; ii >= 3; --ii) {
        const size_t i = ii - 3;
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }

    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = x[i].get_d();

    if (residual) {
        double rmax = 0.0, scale = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double ax = d0[i].get_d() * out[i];
            if (i > 0) ax += dl0[i - 1].get_d() * out[i - 1];
            if (i + 1 < n) ax += du0[i].get_d() * out[i + 1];
            rmax = std::max(rmax, std::abs(ax - b0[i].get_d()));
            scale = std::max(scale, std::abs(b0[i].get_d()));
            scale = std::max(scale, std::abs(out[i]));
        }
        *residual = scale > 0.0 ? rmax / scale : rmax;
    }
    return out;
}

// absorption probabilities at the `high_target` end; both ends absorbing
std::vector<double> absorb_probs(const Environment& env, int64_t left, int64_t right,
                                 bool high_target, double* residual) {
    const size_t n = static_cast<size_t>(right - left + 1);
    std::vector<mpq_class> dl(n - 1, mpq_class(0)), d(n, mpq_class(1)),
        du(n - 1, mpq_class(0)), rhs(n, mpq_class(0));
    rhs[high_target ? n - 1 : 0] = 1;
    for (size_t idx = 1; idx + 1 < n; ++idx) {
        const int64_t x = left + static_cast<int64_t>(idx);
        const mpq_class w(env.omega_at(x));
        dl[idx - 1] = w - 1;  // -(1-w): coefficient of h(x-1) in row x
        du[idx] = -w;         // coefficient of h(x+1)
    }
    return tridiag_solve(dl, d, du, rhs, residual);
}

} // namespace

double hit_before_prob(const Environment& env, int64_t b, int64_t x, int64_t i) {
    if (b < 0 || x < b || i <= x)
        throw BadOrdering("hit_before_prob requires 0 <= b <= x < i");
    if (x == b) return 1.0;
    LogSumExp num, den;
    double v = 0.0;
    if (b == 0) den.add(0.0);
    for (int64_t j = 1; j < i; ++j) {
        v += env.log_rho(j);
        if (j >= b) den.add(v);
        if (j >= x) num.add(v);
    }
    return std::exp(num.log_sum() - den.log_sum());
}

double excursion_visit_mean(const Environment& env, int64_t b, int64_t x) {
    if (b < 1 || x < 1) throw BadOrdering("excursion sites must be >= 1");
    return std::exp(env.log_reversible_measure(x) - env.log_reversible_measure(b));
}

ExcursionLawParams excursion_visit_params(const Environment& env, int64_t b, int64_t x) {
    if (b < 1 || x < 1 || x == b)
        throw BadOrdering("excursion_visit_params requires b, x >= 1 and x != b");
    ExcursionLawParams p;
    if (x > b) {
        const double ls = log_sum_exp_potential(env, b, x - 1);
        p.alpha = env.omega_at(b) * std::exp(env.potential(b) - ls);
        p.beta = (1.0 - env.omega_at(x)) * std::exp(env.potential(x - 1) - ls);
    } else {
        const double ls = log_sum_exp_potential(env, x, b - 1);
        p.alpha = (1.0 - env.omega_at(b)) * std::exp(env.potential(b - 1) - ls);
        p.beta = env.omega_at(x) * std::exp(env.potential(x) - ls);
    }
    return p;
}

double excursion_visit_pmf(const ExcursionLawParams& params, int64_t m) {
    if (m < 0) return 0.0;
    if (m == 0) return 1.0 - params.alpha;
    return params.alpha * params.beta * std::pow(1.0 - params.beta, static_cast<double>(m - 1));
}

double excursion_visit_variance(const Environment& env, int64_t b, int64_t x) {
    const ExcursionLawParams p = excursion_visit_params(env, b, x);
    return p.alpha * (2.0 - p.beta - p.alpha) / (p.beta * p.beta);
}

double golosov_bound_log(const Environment& env, int64_t x) {
    if (x < 1) throw BadOrdering("golosov_bound requires x >= 1");
    double v = 0.0, run_min = 0.0, max_rise = 0.0;
    for (int64_t j = 1; j < x; ++j) {
        v += env.log_rho(j);
        run_min = std::min(run_min, v);
        max_rise = std::max(max_rise, v - run_min);
    }
    return 2.0 * std::log(static_cast<double>(x)) + max_rise;
}

double golosov_bound(const Environment& env, int64_t x) {
    return std::exp(golosov_bound_log(env, x));
}

double escape_parameter(const Environment& env, int64_t b, int64_t i) {
    if (b < 1 || i <= b) throw BadOrdering("escape_parameter requires 1 <= b < i");
    const double ls = log_sum_exp_potential(env, b, i - 1);
    return env.omega_at(b) * std::exp(env.potential(b) - ls);
}

OracleResult solve_finite_chain(const Environment& env, int64_t left, int64_t right,
                                OracleMode mode, int64_t start) {
    if (left < 0 || right <= left) throw BadOrdering("window requires 0 <= left < right");
    if (right - left > 10'000) throw WindowTooLarge("window exceeds 10^4 sites");

    OracleResult out;
    out.left = left;
    out.right = right;

    if (mode == OracleMode::HitProbs) {
        double r1 = 0.0, r2 = 0.0;
        out.absorb_right = absorb_probs(env, left, right, true, &r1);
        out.absorb_left = absorb_probs(env, left, right, false, &r2);
        out.residual = std::max(r1, r2);
        return out;
    }

    // OccupationBefore: transient sites are [left, right) with 0 reflecting,
    // or (left, right) with an absorbing left end
    const bool reflect = (left == 0);
    const int64_t lo = reflect ? 0 : left + 1;
    const int64_t hi = right - 1;
    if (start < lo || start > hi)
        throw BadOrdering("start site must be transient for OccupationBefore");
    const size_t n = static_cast<size_t>(hi - lo + 1);

    // (I - Q^T) u = e_start; row y couples u(y-1) via P(y-1 -> y) and
    // u(y+1) via P(y+1 -> y)
    std::vector<mpq_class> dl(n > 1 ? n - 1 : 0, mpq_class(0)), d(n, mpq_class(1)),
        du(n > 1 ? n - 1 : 0, mpq_class(0)), rhs(n, mpq_class(0));
    rhs[static_cast<size_t>(start - lo)] = 1;
    for (size_t idx = 0; idx < n; ++idx) {
        const int64_t y = lo + static_cast<int64_t>(idx);
        if (y - 1 >= lo) {
            const mpq_class w_up =
                (y - 1 == 0) ? mpq_class(1) : mpq_class(env.omega_at(y - 1));
            dl[idx - 1] = -w_up;  // P(y-1 -> y)
        }
        if (y + 1 <= hi) {
            du[idx] = mpq_class(env.omega_at(y + 1)) - 1;  // -P(y+1 -> y)
        }
    }
    out.occupation = tridiag_solve(dl, d, du, rhs, &out.residual);
    out.start = start;
    double total = 0.0;
    for (double u : out.occupation) total += u;
    out.expected_total = total;
    return out;
}

} // namespace rwre
