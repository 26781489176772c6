#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace overdamp {

// Shortest decimal that round-trips the double exactly.
inline std::string fmt_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace overdamp
