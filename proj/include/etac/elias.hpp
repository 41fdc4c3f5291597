#pragma once

#include <cstdint>

#include "etac/bitio.hpp"

namespace etac {

// Binary length of z: floor(log2(max(z, 1))) + 1.
[[nodiscard]] constexpr unsigned bit_length(std::uint64_t z) noexcept {
    unsigned n = 1;
    while (z > 1) {
        z >>= 1;
        ++n;
    }
    return n;
}

// Budget the escape coder must respect: ell(y) + 2 ell(ell(y)).
[[nodiscard]] constexpr unsigned elias_budget(std::uint64_t y) noexcept {
    return bit_length(y) + 2 * bit_length(bit_length(y));
}

// Elias delta code: ell(ell(y)) - 1 zeros, ell(y) in binary, then the
// ell(y) - 1 low bits of y. Length is ell(y) + 2 ell(ell(y)) - 2.
void elias_encode(std::uint64_t y, BitString& out);
[[nodiscard]] BitString elias_encode(std::uint64_t y);
[[nodiscard]] unsigned elias_length(std::uint64_t y);

// Throws DecodeError(truncated) if the stream ends inside a codeword and
// DecodeError(corrupt) if the length prefix describes a value over 64 bits.
[[nodiscard]] std::uint64_t elias_decode(BitCursor& cursor);

}  // namespace etac
