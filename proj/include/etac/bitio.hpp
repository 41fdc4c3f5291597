#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace etac {

// Growable bit sequence. Bits are packed MSB-first within each byte; the
// unused low bits of the final byte are always zero.
class BitString {
public:
    BitString() = default;

    // Parses a string of '0'/'1' characters; anything else throws
    // std::invalid_argument.
    static BitString from_text(std::string_view bits);

    // Every bit of every byte becomes part of the string (length = 8 * size).
    static BitString from_bytes(std::span<const std::uint8_t> bytes);

    void push_back(bool bit);
    // Appends the low `count` bits of `value`, most significant first.
    void append_bits(std::uint64_t value, unsigned count);
    void append(const BitString& other);

    [[nodiscard]] bool operator[](std::size_t index) const {
        return (bytes_[index >> 3] >> (7 - (index & 7))) & 1u;
    }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

    // Zero-padded to a whole number of bytes.
    [[nodiscard]] const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
    [[nodiscard]] std::string to_text() const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t size_ = 0;
};

// Read position into a BitString. The cursor does not own the string; the
// string must outlive it.
class BitCursor {
public:
    explicit BitCursor(const BitString& bits) noexcept : bits_(&bits) {}

    // Throws DecodeError(truncated) at the end of the string.
    bool read_bit();
    // Reads `count` <= 64 bits MSB-first into the low bits of the result.
    std::uint64_t read_bits(unsigned count);
    // Moves back by `count` bits; throws std::logic_error if count > position().
    void rollback(std::size_t count);

    [[nodiscard]] std::size_t position() const noexcept { return position_; }
    [[nodiscard]] std::size_t high_water() const noexcept { return high_water_; }
    [[nodiscard]] std::size_t remaining() const noexcept { return bits_->size() - position_; }
    [[nodiscard]] bool at_end() const noexcept { return position_ == bits_->size(); }
    [[nodiscard]] const BitString& source() const noexcept { return *bits_; }

private:
    const BitString* bits_;
    std::size_t position_ = 0;
    std::size_t high_water_ = 0;
};

}  // namespace etac
