#include "etac/elias.hpp"

#include <stdexcept>

#include "etac/errors.hpp"

namespace etac {

void elias_encode(std::uint64_t y, BitString& out) {
    if (y == 0) throw std::invalid_argument("elias_encode: value must be positive");
    const unsigned len = bit_length(y);
    const unsigned len_len = bit_length(len);
    for (unsigned i = 1; i < len_len; ++i) out.push_back(false);
    out.append_bits(len, len_len);
    out.append_bits(y, len - 1);
}

BitString elias_encode(std::uint64_t y) {
    BitString out;
    elias_encode(y, out);
    return out;
}

unsigned elias_length(std::uint64_t y) {
    if (y == 0) throw std::invalid_argument("elias_length: value must be positive");
    return bit_length(y) + 2 * bit_length(bit_length(y)) - 2;
}

std::uint64_t elias_decode(BitCursor& cursor) {
    unsigned zeros = 0;
    while (!cursor.read_bit()) {
        // ell(64) = 7, so at most six leading zeros are meaningful.
        if (++zeros > 6) throw DecodeError(DecodeErrorKind::corrupt, "Elias prefix too long");
    }
    const std::uint64_t len = (std::uint64_t{1} << zeros) | cursor.read_bits(zeros);
    if (len > 64) throw DecodeError(DecodeErrorKind::corrupt, "Elias length exceeds 64 bits");
    const auto low_bits = static_cast<unsigned>(len - 1);
    return (std::uint64_t{1} << low_bits) | cursor.read_bits(low_bits);
}

}  // namespace etac
