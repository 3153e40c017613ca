#pragma once

#include <cmath>
#include <cstdint>

namespace amm {

// Deterministic counter-seeded generator (xoshiro256++ with splitmix64
// seeding). All randomness in the library flows through this type so that
// identical seeds reproduce identical paths bit-for-bit; the standard
// library distributions are avoided because their output is
// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& w : s_) w = splitmix64(x);
        have_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in (0,1); never returns 0 or 1 exactly.
    double uniform() {
        const std::uint64_t u = next_u64() >> 11;  // 53 bits
        double v = (static_cast<double>(u) + 0.5) * (1.0 / 9007199254740992.0);
        return v;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (deterministic, platform independent).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    bool bernoulli(double p) { return uniform() < p; }

    // Independent child stream, e.g. one per Brownian driver.
    Rng stream(std::uint64_t id) const {
        return Rng(s_[0] ^ s_[2], 0x517cc1b727220a95ULL ^ id);
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t s_[4];
    bool have_spare_;
    double spare_;
};

}  // namespace amm
