#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mconcord {

/// Deterministic random source with explicit transforms.  The standard
/// distributions are implementation-defined, so uniform and normal draws
/// are spelled out here to keep output identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), base_seed_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw on [0, 1) with 53 bits of precision.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal draw via Box-Muller; the second value of each pair
    /// is cached so consecutive calls consume one uniform pair per two draws.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        // Guard the log: uniform01 can return exactly 0.
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    /// Uniform index in {0, ..., k-1}.
    int pick(int k) {
        return static_cast<int>(uniform01() * static_cast<double>(k));
    }

    bool bernoulli(double prob) { return uniform01() < prob; }

    /// Independent child stream for substream use (one per block, per fold,
    /// ...).  SplitMix64 mixes seed and tag so siblings do not collide.
    Rng derive(std::uint64_t tag) const {
        std::uint64_t z = base_seed_ + 0x9e3779b97f4a7c15ULL * (tag + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t base_seed_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace mconcord
