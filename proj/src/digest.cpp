#include "egorank/digest.hpp"

#include <array>

namespace egorank {

std::string digest_hex(std::string_view bytes) {
    static constexpr char hexdigits[] = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::array<char, 16> out{};
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hexdigits[h & 0xf];
        h >>= 4;
    }
    return std::string(out.data(), out.size());
}

} // namespace egorank
