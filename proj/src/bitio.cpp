#include "etac/bitio.hpp"

#include <stdexcept>

#include "etac/errors.hpp"

namespace etac {

const char* to_string(DecodeErrorKind kind) noexcept {
    switch (kind) {
        case DecodeErrorKind::truncated: return "truncated";
        case DecodeErrorKind::corrupt: return "corrupt";
        case DecodeErrorKind::bad_magic: return "bad-magic";
        case DecodeErrorKind::unknown_flags: return "unknown-flags";
        case DecodeErrorKind::trailing_garbage: return "trailing-garbage";
    }
    return "unknown";
}

BitString BitString::from_text(std::string_view bits) {
    BitString out;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("BitString::from_text: expected '0' or '1'");
        }
        out.push_back(c == '1');
    }
    return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
    BitString out;
    out.bytes_.assign(bytes.begin(), bytes.end());
    out.size_ = bytes.size() * 8;
    return out;
}

void BitString::push_back(bool bit) {
    if ((size_ & 7) == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (size_ & 7));
    ++size_;
}

void BitString::append_bits(std::uint64_t value, unsigned count) {
    if (count > 64) throw std::invalid_argument("BitString::append_bits: count > 64");
    for (unsigned i = count; i-- > 0;) push_back((value >> i) & 1u);
}

void BitString::append(const BitString& other) {
    for (std::size_t i = 0; i < other.size(); ++i) push_back(other[i]);
}

std::string BitString::to_text() const {
    std::string out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) out.push_back((*this)[i] ? '1' : '0');
    return out;
}

bool BitCursor::read_bit() {
    if (position_ >= bits_->size()) {
        throw DecodeError(DecodeErrorKind::truncated, "bit stream truncated");
    }
    const bool bit = (*bits_)[position_++];
    if (position_ > high_water_) high_water_ = position_;
    return bit;
}

std::uint64_t BitCursor::read_bits(unsigned count) {
    if (count > 64) throw std::invalid_argument("BitCursor::read_bits: count > 64");
    if (count > remaining()) {
        throw DecodeError(DecodeErrorKind::truncated, "bit stream truncated");
    }
    std::uint64_t value = 0;
    for (unsigned i = 0; i < count; ++i) value = (value << 1) | (read_bit() ? 1u : 0u);
    return value;
}

void BitCursor::rollback(std::size_t count) {
    if (count > position_) throw std::logic_error("BitCursor::rollback past start of stream");
    position_ -= count;
}

}  // namespace etac
