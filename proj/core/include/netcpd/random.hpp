#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace netcpd {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives an independent stream seed from a base seed and a path of
/// integers (replicate index, arm tag, ...). Distinct paths give unrelated
/// seeds; the mapping is fixed so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded generator with distribution helpers whose output is fully
/// specified here (no implementation-defined std:: distributions), so
/// samples are bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer on [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound);
    int rademacher() { return (engine_() >> 63) != 0 ? 1 : -1; }

private:
    std::mt19937_64 engine_;
};

}  // namespace netcpd
