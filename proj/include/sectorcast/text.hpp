#ifndef SECTORCAST_TEXT_HPP
#define SECTORCAST_TEXT_HPP

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace sectorcast {

inline std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

// FNV-1a 64-bit over raw bytes; used for input digests in run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    char buf[17];
    auto [ptr, ec] = std::to_chars(buf, buf + 16, v, 16);
    (void)ec;
    std::string digits(buf, ptr);
    return std::string(16 - digits.size(), '0') + digits;
}

}  // namespace sectorcast

#endif  // SECTORCAST_TEXT_HPP
