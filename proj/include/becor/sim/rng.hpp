#pragma once

// Counter-based Gaussian draws keyed by (path, step, name, stream): changing
// the path count never perturbs earlier paths, and equal seeds reproduce
// bit-identical output on any platform.

#include <cstdint>

#include "becor/math/normal.hpp"

namespace becor {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t path, std::uint64_t step, std::uint64_t name,
                       std::uint64_t stream = 0) const {
        std::uint64_t h = detail::splitmix64(seed_ ^ 0x2545f4914f6cdd1dULL);
        h = detail::splitmix64(h ^ (path + 0x9e3779b97f4a7c15ULL));
        h = detail::splitmix64(h ^ (step + 0xd1b54a32d192ed03ULL));
        h = detail::splitmix64(h ^ (name + 0x8cb92ba72f3d8dd7ULL));
        h = detail::splitmix64(h ^ (stream + 0x4cf5ad432745937fULL));
        return h;
    }

    // uniform strictly inside (0,1): 53 mantissa bits, half-ulp offset
    double uniform(std::uint64_t path, std::uint64_t step, std::uint64_t name,
                   std::uint64_t stream = 0) const {
        const std::uint64_t b = bits(path, step, name, stream);
        return (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal(std::uint64_t path, std::uint64_t step, std::uint64_t name,
                  std::uint64_t stream = 0) const {
        return detail::ppnd16(uniform(path, step, name, stream));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

} // namespace becor
