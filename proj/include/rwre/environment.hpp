#pragma once
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/logsumexp.hpp"
#include "rwre/rng.hpp"

namespace rwre {

struct InvalidSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class EnvFamily { TwoPoint, UniformSymmetric };

// i.i.d. environment law. TwoPoint(a): log rho_x = +-a with probability 1/2
// each. UniformSymmetric(delta): log rho_x uniform on [-A, A] with
// A = log((1-delta)/delta). Both have E log rho = 0, Var log rho > 0 and
// omega_x in [delta, 1-delta].
struct EnvironmentSpec {
    EnvFamily family = EnvFamily::TwoPoint;
    double a = 1.0;        // TwoPoint support half-width of log rho
    double delta = 0.1;    // UniformSymmetric ellipticity bound
    uint64_t seed = 0;
    int64_t length_hint = 0;  // advisory only; sites are an unbounded stream

    void validate() const;
    std::string family_name() const;
};

// Quenched environment. omega_x is a pure function of (seed, x): a
// stateless 64-bit mixing hash of (seed XOR x) feeds the family's
// inverse CDF, so any site can be regenerated bit-identically without
// storing the stream. Immutable after construction; the potential
// checkpoint cache is internally synchronized.
class Environment {
public:
    explicit Environment(EnvironmentSpec spec);

    // Test-support constructor: sites 1..prefix.size() take the given
    // log rho values (each must lie in [-C, C]), later sites revert to the
    // family draw.
    static Environment with_forced_log_rho(EnvironmentSpec spec,
                                           std::vector<double> log_rho_prefix);

    const EnvironmentSpec& spec() const { return spec_; }

    double delta() const { return delta_; }
    // increment bound C = |log delta - log(1-delta)|
    double increment_bound() const { return c_bound_; }
    bool has_forced_prefix() const { return static_cast<bool>(forced_); }

    // x >= 1; value in [delta, 1-delta]
    double omega_at(int64_t x) const {
        if (x < 1) throw InvalidSpec("omega_at: site must be >= 1");
        // rho = (1-omega)/omega  =>  omega = 1/(1+rho)
        return 1.0 / (1.0 + std::exp(raw_log_rho(x)));
    }

    // x >= 1; value in [-C, C]
    double log_rho(int64_t x) const {
        if (x < 1) throw InvalidSpec("log_rho: site must be >= 1");
        return raw_log_rho(x);
    }

    // V(x) = sum_{i<=x} log rho_i, V(0) = 0. Compensated summation with
    // internal checkpoints every 4096 sites, so ascending access is O(1)
    // amortized and any x reproduces the exact streaming value.
    double potential(int64_t x) const;

    double conductance(int64_t x) const;       // e^{-V(x)}
    double log_conductance(int64_t x) const;   // -V(x), for |V| beyond exp range

    double reversible_measure(int64_t x) const;     // mu(0)=1, mu(x)=e^{-V(x)}+e^{-V(x-1)}
    double log_reversible_measure(int64_t x) const; // log mu(x), log-sum-exp evaluated

private:
    double raw_log_rho(int64_t x) const {
        if (forced_ && static_cast<uint64_t>(x - 1) < forced_->size())
            return (*forced_)[static_cast<size_t>(x - 1)];
        const uint64_t h = mix64(spec_.seed ^ static_cast<uint64_t>(x));
        if (spec_.family == EnvFamily::TwoPoint)
            return (h >> 63) ? spec_.a : -spec_.a;
        return uniform_halfwidth_ * (2.0 * SplitMix64::to_unit(h) - 1.0);
    }

    EnvironmentSpec spec_;
    double delta_ = 0.0;
    double c_bound_ = 0.0;
    double uniform_halfwidth_ = 0.0;  // A for UniformSymmetric
    std::shared_ptr<const std::vector<double>> forced_;

    struct Checkpoint {
        double sum;
        double comp;
    };
    static constexpr int64_t kCheckpointStride = 4096;
    struct PotentialCache {
        std::mutex mutex;
        std::vector<Checkpoint> checkpoints;  // checkpoint i holds V at site i*stride
    };
    std::shared_ptr<PotentialCache> cache_;  // shared across copies; derived from spec only
};

// Sequential reader of the potential: one Kahan-compensated pass, one site
// per advance. Produces exactly the same values as Environment::potential.
class PotentialCursor {
public:
    explicit PotentialCursor(const Environment& env) : env_(&env) {}

    int64_t site() const { return x_; }
    double value() const { return sum_.value(); }

    // move to site x_+1 and return V there
    double advance() {
        ++x_;
        sum_.add(env_->log_rho(x_));
        return sum_.value();
    }

private:
    const Environment* env_;
    int64_t x_ = 0;
    KahanSum sum_;
};

} // namespace rwre
