#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "irs/types.hpp"

namespace irs {

// Seedable generator with a fixed, platform-independent normal transform.
// std::normal_distribution is implementation-defined, which would make
// sweep outputs differ between standard libraries.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    // Standard normal via Box-Muller; caches the second variate.
    double normal();
    // Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
    cplx complex_normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Stable 64-bit combination of a master seed with a sequence of stream identifiers.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids);

} // namespace irs
