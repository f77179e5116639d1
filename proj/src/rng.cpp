#include "qsme/rng.hpp"

#include <cmath>
#include <numbers>

namespace qsme::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= purpose * 0xd1342543de82ef95ULL;
    std::uint64_t b = splitmix64(s);
    s ^= index * 0xaf251af3b0f025b5ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b + 0x2545f4914f6cdd1dULL * c);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
} // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    // Expand the seed with splitmix64 as the xoshiro authors recommend.
    for (auto& word : s_) word = splitmix64(seed);
    // An all-zero state is invalid; splitmix64 of (0,1,2,3) is not all zero,
    // but guard anyway.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Xoshiro256pp::next() {
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

double uniform01(Xoshiro256pp& gen) {
    return static_cast<double>(gen.next() >> 11) * 0x1.0p-53;
}

double GaussianStream::normal() {
    // Box-Muller, cosine branch only: exactly two generator outputs per
    // variate, so stream positions are a pure function of draws().
    double u1 = uniform01(gen_);
    double u2 = uniform01(gen_);
    ++draws_;
    double r = std::sqrt(-2.0 * std::log1p(-u1)); // 1-u1 in (0,1], log finite
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace qsme::rng
