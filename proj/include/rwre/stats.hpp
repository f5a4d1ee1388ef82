#pragma once
#include <cstdint>
#include <vector>

namespace rwre::stats {

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // unbiased
double std_error(const std::vector<double>& xs);

// linear-interpolation quantile of a copy of xs; q in [0,1]
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);

// one-sample Kolmogorov-Smirnov distances
double ks_uniform01(std::vector<double> xs);
double ks_exp1(std::vector<double> xs);
// two-sample KS distance
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit ols_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// upper quantile of the chi-square distribution (for goodness-of-fit gates)
double chi_square_quantile(double df, double p);

// Binned goodness of fit of visit counts against the almost-geometric law
// P(Y=0) = 1-alpha, P(Y=m) = alpha (1-beta)^{m-1} beta. Singleton bins while
// the expected count stays >= 5, remainder merged into the tail.
struct ChiSquare {
    double statistic = 0.0;
    double df = 0.0;
};
ChiSquare chi_square_geometric(const std::vector<uint64_t>& histogram, uint64_t n_samples,
                               double alpha, double beta);

} // namespace rwre::stats
