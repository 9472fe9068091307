#include "toolspin/hash.hpp"

#include <stdexcept>

namespace toolspin {

std::string to_hex64(uint64_t value) {
    static const char * digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

uint64_t from_hex64(const std::string & hex) {
    if (hex.size() != 16) {
        throw std::invalid_argument("expected 16 hex digits, got '" + hex + "'");
    }
    uint64_t value = 0;
    for (char c : hex) {
        value <<= 4;
        if (c >= '0' && c <= '9') value |= static_cast<uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') value |= static_cast<uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') value |= static_cast<uint64_t>(c - 'A' + 10);
        else throw std::invalid_argument("bad hex digit in '" + hex + "'");
    }
    return value;
}

} // namespace toolspin
