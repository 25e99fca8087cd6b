#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace egorank {

/// 64-bit FNV-1a over a byte string.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Hex form used for stream digests and state checksums (16 lowercase digits).
std::string digest_hex(std::string_view bytes);

} // namespace egorank
