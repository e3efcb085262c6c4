#pragma once

#include <cstdint>
#include <random>

namespace luxp {

using Rng = std::mt19937_64;

/// Mixes a base seed with a stream index (splitmix64) so that independent
/// streams, e.g. bootstrap replicates or observers, can be generated in any
/// order and still be reproducible.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

inline Rng make_rng(std::uint64_t base, std::uint64_t stream) { return Rng(derive_seed(base, stream)); }

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n) by rejection; portable across standard libraries.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

} // namespace luxp
