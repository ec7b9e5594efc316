#include "masim/hash.hpp"

#include <array>

namespace masim {

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::array<char, 16> out{};
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return std::string(out.data(), out.size());
}

}  // namespace masim
