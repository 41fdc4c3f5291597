#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "etac/bitio.hpp"

namespace etac {

// Integer-weight coding distribution over symbols 0..alphabet_size()-1.
// cumulative(j) is the sum of the weights of symbols below j, and find(t)
// returns the symbol whose cumulative range [cumulative(s), cumulative(s) +
// weight(s)) contains t.
template <class M>
concept WeightModel = requires(const M& m, std::uint64_t j) {
    { m.alphabet_size() } -> std::convertible_to<std::uint64_t>;
    { m.total() } -> std::convertible_to<std::uint64_t>;
    { m.weight(j) } -> std::convertible_to<std::uint64_t>;
    { m.cumulative(j) } -> std::convertible_to<std::uint64_t>;
    { m.find(j) } -> std::convertible_to<std::uint64_t>;
};

// Totals must stay below this for the coder's precision guarantees.
inline constexpr std::uint64_t kMaxModelTotal = std::uint64_t{1} << 30;

// Explicit weight vector; handy for tests and small alphabets.
class DenseWeights {
public:
    // Throws std::invalid_argument on an empty vector, a zero weight, or a
    // total >= kMaxModelTotal.
    explicit DenseWeights(std::vector<std::uint64_t> weights);

    [[nodiscard]] std::uint64_t alphabet_size() const noexcept { return weights_.size(); }
    [[nodiscard]] std::uint64_t total() const noexcept { return prefix_.back(); }
    [[nodiscard]] std::uint64_t weight(std::uint64_t j) const { return weights_.at(j); }
    [[nodiscard]] std::uint64_t cumulative(std::uint64_t j) const { return prefix_.at(j); }
    [[nodiscard]] std::uint64_t find(std::uint64_t target) const;

private:
    std::vector<std::uint64_t> weights_;
    std::vector<std::uint64_t> prefix_;
};

// Binary arithmetic coder with 62-bit registers and E1/E2/E3 renormalization.
// Output is organized in blocks: flush() terminates a block with the pending
// underflow bits plus two bits selecting the quarter that contains `low`,
// after which any continuation of the stream decodes the block identically.
namespace arith {
inline constexpr unsigned kRegisterBits = 62;
inline constexpr std::uint64_t kTop = (std::uint64_t{1} << kRegisterBits) - 1;
inline constexpr std::uint64_t kHalf = std::uint64_t{1} << (kRegisterBits - 1);
inline constexpr std::uint64_t kQuarter = std::uint64_t{1} << (kRegisterBits - 2);
inline constexpr std::uint64_t kThreeQuarters = kHalf + kQuarter;
// Bits the decoder has read beyond the end of a block when it finishes it.
inline constexpr unsigned kBlockLookahead = kRegisterBits - 2;
}  // namespace arith

class ArithEncoder {
public:
    template <WeightModel M>
    void encode(const M& model, std::uint64_t symbol, BitString& out) {
        check_symbol(symbol, model.alphabet_size());
        encode_range(model.cumulative(symbol), model.weight(symbol), model.total(), out);
    }

    // Low-level entry point: narrow to [cum, cum + weight) out of total.
    void encode_range(std::uint64_t cum, std::uint64_t weight, std::uint64_t total, BitString& out);

    // Terminates the current block and resets the registers.
    void flush(BitString& out);

    [[nodiscard]] std::uint64_t low() const noexcept { return low_; }
    [[nodiscard]] std::uint64_t high() const noexcept { return high_; }
    [[nodiscard]] std::uint64_t pending() const noexcept { return pending_; }

private:
    static void check_symbol(std::uint64_t symbol, std::uint64_t alphabet_size);
    void emit(bool bit, BitString& out);

    std::uint64_t low_ = 0;
    std::uint64_t high_ = arith::kTop;
    std::uint64_t pending_ = 0;
};

// Mirror of ArithEncoder. Bits past the physical end of the stream are read
// as zeros; finish_block() rolls the cursor back to the first bit after the
// block and reports truncation if any of those phantom bits were needed.
class ArithDecoder {
public:
    template <WeightModel M>
    std::uint64_t decode(const M& model, BitCursor& cursor) {
        const std::uint64_t total = model.total();
        const std::uint64_t target = decode_target(total, cursor);
        const std::uint64_t symbol = model.find(target);
        if (symbol >= model.alphabet_size()) corrupt();
        const std::uint64_t cum = model.cumulative(symbol);
        const std::uint64_t weight = model.weight(symbol);
        if (target < cum || target - cum >= weight) corrupt();
        narrow(cum, weight, total, cursor);
        return symbol;
    }

    // Call after decoding the block's final symbol.
    void finish_block(BitCursor& cursor);

    [[nodiscard]] bool in_block() const noexcept { return primed_; }

private:
    std::uint64_t decode_target(std::uint64_t total, BitCursor& cursor);
    void narrow(std::uint64_t cum, std::uint64_t weight, std::uint64_t total, BitCursor& cursor);
    bool next_bit(BitCursor& cursor);
    [[noreturn]] static void corrupt();

    std::uint64_t low_ = 0;
    std::uint64_t high_ = arith::kTop;
    std::uint64_t value_ = 0;
    std::size_t phantom_ = 0;
    bool primed_ = false;
};

}  // namespace etac
