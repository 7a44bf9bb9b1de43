#pragma once

#include <cstdint>
#include <random>

namespace driftflow {

// Deterministic random source. mt19937_64 supplies the bit stream (the engine
// itself is fully specified by the standard); the uniform and normal
// transforms are done here rather than with std:: distributions, whose output
// is implementation defined and would break the bitwise reproducibility
// contract across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53 random mantissa bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Integer in [0, n). Rejection-free modulo is fine at the scales used
    // here, but use Lemire-style rejection to keep the draw unbiased.
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal via Box-Muller; the spare value is cached.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Derives an independent stream from (seed, stream id) with splitmix64
// finalization. Used to give each consumer of a master seed its own stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace driftflow
