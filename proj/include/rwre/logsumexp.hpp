#pragma once
#include <cmath>
#include <limits>

namespace rwre {

// Streaming log(sum exp(a_i)) with a running maximum. The potential spans
// hundreds of units, so partition sums like sum e^{V(j)} or the valley
// width sum e^{-[V(i)-V(b)]} must never be formed in the linear domain.
//
// Invariant: log_sum() == max_ + log(scaled_), scaled_ = sum e^{a_i - max_}.
class LogSumExp {
public:
    void add(double a) {
        if (scaled_ == 0.0) {
            max_ = a;
            scaled_ = 1.0;
        } else if (a <= max_) {
            scaled_ += std::exp(a - max_);
        } else {
            scaled_ = scaled_ * std::exp(max_ - a) + 1.0;
            max_ = a;
        }
    }

    void merge(const LogSumExp& other) {
        if (other.scaled_ == 0.0) return;
        if (scaled_ == 0.0) {
            *this = other;
        } else if (other.max_ <= max_) {
            scaled_ += other.scaled_ * std::exp(other.max_ - max_);
        } else {
            scaled_ = scaled_ * std::exp(max_ - other.max_) + other.scaled_;
            max_ = other.max_;
        }
    }

    bool empty() const { return scaled_ == 0.0; }

    double max_exponent() const {
        if (scaled_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_;
    }

    double log_sum() const {
        if (scaled_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(scaled_);
    }

    // sum e^{a_i - shift}; safe whenever shift is near the max term.
    double sum_shifted(double shift) const {
        if (scaled_ == 0.0) return 0.0;
        return scaled_ * std::exp(max_ - shift);
    }

    void reset() { max_ = 0.0; scaled_ = 0.0; }

private:
    double max_ = 0.0;
    double scaled_ = 0.0;
};

// Kahan-compensated running sum; relative error stays at a few ulps even
// over 1e9 increments, and the (sum, compensation) pair is a pure function
// of the prefix, so resuming from a checkpoint is bit-exact.
class KahanSum {
public:
    KahanSum() = default;
    KahanSum(double sum, double comp) : sum_(sum), comp_(comp) {}

    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    double value() const { return sum_; }
    double compensation() const { return comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace rwre
