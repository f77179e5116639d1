#pragma once

// Deterministic random number streams. The generator family is fixed:
// per-stream seeds are derived with splitmix64 from (master seed, purpose,
// index), streams are xoshiro256++, and normal variates use the Box-Muller
// cosine branch consuming exactly two 64-bit outputs each. Changing any of
// these breaks bit-reproducibility of recorded trajectories.

#include <cstdint>

namespace qsme::rng {

std::uint64_t splitmix64(std::uint64_t& state);

// Stable 64-bit seed for stream (purpose, index) under a master seed.
// purpose 0 = trajectory streams, 1 = initial-condition samplers,
// 2 = test/property batteries.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose, std::uint64_t index);

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed);
    std::uint64_t next();

private:
    std::uint64_t s_[4];
};

// Uniform double in [0,1) from the top 53 bits.
double uniform01(Xoshiro256pp& gen);

class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed), seed_(seed) {}

    // One standard normal variate.
    double normal();

    std::uint64_t draws() const { return draws_; }
    std::uint64_t seed() const { return seed_; }

private:
    Xoshiro256pp gen_;
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
};

} // namespace qsme::rng
