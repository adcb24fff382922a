#ifndef SODA_RNG_HPP
#define SODA_RNG_HPP

#include <cstdint>
#include <random>

namespace soda {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic child stream: (master seed, stream index) -> rng.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix64(mix64(seed) ^ stream));
}

}  // namespace soda

#endif
