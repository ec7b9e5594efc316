#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace masim {

inline constexpr std::uint64_t kFnvOffsetBasis = 1469598103934665603ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = kFnvOffsetBasis) {
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

std::string hex64(std::uint64_t value);

}  // namespace masim
