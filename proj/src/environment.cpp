#include "rwre/environment.hpp"

#include <cmath>

namespace rwre {

void EnvironmentSpec::validate() const {
    switch (family) {
        case EnvFamily::TwoPoint:
            if (!(a > 0.0) || !std::isfinite(a))
                throw InvalidSpec("TwoPoint: a must be a positive real, got " + std::to_string(a));
            break;
        case EnvFamily::UniformSymmetric:
            if (!(delta > 0.0 && delta < 0.5))
                throw InvalidSpec("UniformSymmetric: delta must lie in (0, 1/2), got " +
                                  std::to_string(delta));
            break;
    }
    if (length_hint < 0) throw InvalidSpec("length_hint must be nonnegative");
}

std::string EnvironmentSpec::family_name() const {
    return family == EnvFamily::TwoPoint ? "twopoint" : "uniform";
}

Environment::Environment(EnvironmentSpec spec) : spec_(spec) {
    spec_.validate();
    if (spec_.family == EnvFamily::TwoPoint) {
        // omega = 1/(1+e^{+-a}), so delta = 1/(1+e^a) and C = a
        delta_ = 1.0 / (1.0 + std::exp(spec_.a));
        c_bound_ = spec_.a;
    } else {
        delta_ = spec_.delta;
        uniform_halfwidth_ = std::log((1.0 - delta_) / delta_);
        c_bound_ = uniform_halfwidth_;
    }
    cache_ = std::make_shared<PotentialCache>();
    cache_->checkpoints.push_back({0.0, 0.0});
}

Environment Environment::with_forced_log_rho(EnvironmentSpec spec,
                                             std::vector<double> log_rho_prefix) {
    Environment env(spec);
    for (double d : log_rho_prefix) {
        if (std::abs(d) > env.c_bound_ + 1e-12)
            throw InvalidSpec("forced log rho value " + std::to_string(d) +
                              " outside [-C, C], C = " + std::to_string(env.c_bound_));
    }
    env.forced_ = std::make_shared<const std::vector<double>>(std::move(log_rho_prefix));
    return env;
}

double Environment::potential(int64_t x) const {
    if (x < 0) throw InvalidSpec("potential: site must be >= 0");
    if (x == 0) return 0.0;

    KahanSum sum;
    int64_t from;
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto& checkpoints = cache_->checkpoints;
        const int64_t want = x / kCheckpointStride;
        int64_t have = static_cast<int64_t>(checkpoints.size()) - 1;
        if (have < want) {
            // extend the checkpoint table up to the block containing x
            KahanSum s(checkpoints.back().sum, checkpoints.back().comp);
            for (int64_t i = have * kCheckpointStride + 1; i <= want * kCheckpointStride; ++i) {
                s.add(raw_log_rho(i));
                if (i % kCheckpointStride == 0)
                    checkpoints.push_back({s.value(), s.compensation()});
            }
        }
        sum = KahanSum(checkpoints[static_cast<size_t>(want)].sum,
                       checkpoints[static_cast<size_t>(want)].comp);
        from = want * kCheckpointStride;
    }
    for (int64_t i = from + 1; i <= x; ++i) sum.add(raw_log_rho(i));
    return sum.value();
}

double Environment::conductance(int64_t x) const {
    return std::exp(-potential(x));
}

double Environment::log_conductance(int64_t x) const {
    return -potential(x);
}

double Environment::log_reversible_measure(int64_t x) const {
    if (x < 0) throw InvalidSpec("reversible_measure: site must be >= 0");
    if (x == 0) return 0.0;
    LogSumExp lse;
    lse.add(-potential(x));
    lse.add(-potential(x - 1));
    return lse.log_sum();
}

double Environment::reversible_measure(int64_t x) const {
    return std::exp(log_reversible_measure(x));
}

} // namespace rwre
