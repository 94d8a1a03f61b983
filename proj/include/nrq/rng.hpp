#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nrq/types.hpp"

namespace nrq {

// Deterministic random source. mt19937_64 output is fixed by the standard and
// the distributions below are hand-rolled, so streams are reproducible across
// platforms and independent of library internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform in [0, 1).
    Real uniform() {
        return static_cast<Real>(engine_() >> 11) * 0x1.0p-53;
    }

    Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

    Real log_uniform(Real lo, Real hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Standard normal via Box-Muller.
    Real normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        Real u1 = uniform();
        Real u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const Real radius = std::sqrt(-2.0 * std::log(u1));
        const Real angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    // splitmix64 mix for deriving independent per-stream seeds.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    Real spare_ = 0.0;
};

} // namespace nrq
