#include "rwre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace rwre::stats {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 samples");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double std_error(const std::vector<double>& xs) {
    return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    const double h = q * static_cast<double>(xs.size() - 1);
    const size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= xs.size()) return xs.back();
    const double frac = h - static_cast<double>(lo);
    return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

namespace {

template <typename Cdf>
double ks_against(std::vector<double> xs, Cdf cdf) {
    if (xs.empty()) throw std::invalid_argument("KS of empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

} // namespace

double ks_uniform01(std::vector<double> xs) {
    return ks_against(std::move(xs),
                      [](double x) { return std::clamp(x, 0.0, 1.0); });
}

double ks_exp1(std::vector<double> xs) {
    return ks_against(std::move(xs),
                      [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); });
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS of empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return d;
}

LinearFit ols_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("ols_fit needs matched samples, n >= 2");
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_fit: degenerate x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

double chi_square_quantile(double df, double p) {
    boost::math::chi_squared dist(df);
    return boost::math::quantile(dist, p);
}

ChiSquare chi_square_geometric(const std::vector<uint64_t>& histogram, uint64_t n_samples,
                               double alpha, double beta) {
    if (n_samples == 0) throw std::invalid_argument("empty histogram");
    const double n = static_cast<double>(n_samples);

    // expected per value: m=0 -> n(1-alpha); m>=1 -> n alpha beta (1-beta)^{m-1};
    // survival past M: n alpha (1-beta)^{M-1}
    std::vector<double> exp_bins;
    std::vector<double> obs_bins;
    uint64_t obs_used = 0;
    int64_t m = 0;
    while (true) {
        const double tail =
            m == 0 ? n : n * alpha * std::pow(1.0 - beta, static_cast<double>(m - 1));
        const double e = m == 0 ? n * (1.0 - alpha)
                                : n * alpha * beta * std::pow(1.0 - beta,
                                                              static_cast<double>(m - 1));
        const double tail_after = n * alpha * std::pow(1.0 - beta, static_cast<double>(m));
        if (m > 0 && (e < 5.0 || tail_after < 5.0)) {
            // merge the remainder into one tail bin
            uint64_t obs_tail = n_samples - obs_used;
            exp_bins.push_back(tail);
            obs_bins.push_back(static_cast<double>(obs_tail));
            break;
        }
        const uint64_t o =
            static_cast<size_t>(m) < histogram.size() ? histogram[static_cast<size_t>(m)] : 0;
        exp_bins.push_back(e);
        obs_bins.push_back(static_cast<double>(o));
        obs_used += o;
        ++m;
    }

    ChiSquare out;
    if (exp_bins.size() < 2) {
        out.df = 0.0;
        return out;
    }
    for (size_t i = 0; i < exp_bins.size(); ++i) {
        const double d = obs_bins[i] - exp_bins[i];
        out.statistic += d * d / exp_bins[i];
    }
    out.df = static_cast<double>(exp_bins.size() - 1);
    return out;
}

} // namespace rwre::stats
