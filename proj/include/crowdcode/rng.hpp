#pragma once

#include <cstdint>
#include <random>

namespace crowdcode {

// splitmix64; used to turn (base seed, stream index) into independent
// engine seeds so parallel and serial sweeps see identical streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x6a09e667f3bcc909ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t base, std::uint64_t stream = 0) {
    return std::mt19937_64(derive_seed(base, stream));
}

}  // namespace crowdcode
