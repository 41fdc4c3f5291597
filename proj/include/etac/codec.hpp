#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "etac/arith.hpp"
#include "etac/bitio.hpp"
#include "etac/ktmodel.hpp"
#include "etac/symbol.hpp"
#include "etac/threshold.hpp"

namespace etac {

// Which threshold decides censoring. rank: censor x_i iff x_i > M_{i-1},
// mixture alphabet {0..M_{i-1}}. value: censor iff x_i > tau_{i-1},
// alphabet {0..tau_{i-1}}. Both keep the same ThresholdState.
enum class CensorRule : std::uint8_t { rank = 0, value = 1 };

[[nodiscard]] std::string_view to_string(CensorRule rule) noexcept;
// Accepts "rank" or "value"; throws std::invalid_argument otherwise.
[[nodiscard]] CensorRule parse_censor_rule(std::string_view text);

struct CodelengthReport {
    std::size_t symbols = 0;
    std::size_t total_bits = 0;
    std::size_t mixture_bits = 0;  // arithmetic blocks, C_M
    std::size_t elias_bits = 0;    // escape excesses and terminator, C_E
    std::size_t censored = 0;      // escapes for data symbols (terminator excluded)
    std::size_t final_m = 0;
    Symbol final_tau = 0;
    double ideal_mixture_bits = 0.0;  // sum of -log2(weight / total) over coded symbols
};

// Online encoder. Everything written to bits() after push(x_i) depends only
// on x_1..x_i.
class Encoder {
public:
    explicit Encoder(CensorRule rule = CensorRule::rank) : rule_(rule) {}

    // Throws std::invalid_argument for 0 or symbols above kMaxSymbol, and
    // std::length_error if the value rule would need a mixture alphabet
    // beyond the coder's precision.
    void push(Symbol x);
    // Codes the terminator. No further pushes are allowed.
    void finish();

    [[nodiscard]] CensorRule rule() const noexcept { return rule_; }
    [[nodiscard]] bool finished() const noexcept { return finished_; }
    [[nodiscard]] const BitString& bits() const noexcept { return bits_; }
    [[nodiscard]] const ThresholdState& threshold() const noexcept { return threshold_; }
    [[nodiscard]] const CountTable& counts() const noexcept { return counts_; }
    [[nodiscard]] const CodelengthReport& report() const noexcept { return report_; }

    // Threshold that decides censoring of the next symbol.
    [[nodiscard]] std::uint64_t active_threshold() const noexcept;

private:
    void code(Symbol x);

    CensorRule rule_;
    ArithEncoder arith_;
    BitString bits_;
    ThresholdState threshold_;
    CountTable counts_;
    CodelengthReport report_;
    bool finished_ = false;
};

// Online decoder over a payload produced by Encoder.
class Decoder {
public:
    Decoder(const BitString& payload, CensorRule rule) : rule_(rule), cursor_(payload) {}

    // Next message symbol, or nullopt once the terminator has been read.
    // Throws DecodeError on malformed input.
    std::optional<Symbol> next();
    // After the terminator: everything left must be zero padding (< 8 bits).
    void check_padding() const;

    [[nodiscard]] const ThresholdState& threshold() const noexcept { return threshold_; }
    [[nodiscard]] const CountTable& counts() const noexcept { return counts_; }
    [[nodiscard]] const BitCursor& cursor() const noexcept { return cursor_; }
    [[nodiscard]] bool done() const noexcept { return done_; }

private:
    [[nodiscard]] std::uint64_t active_threshold() const noexcept;
    void accept(Symbol x);

    CensorRule rule_;
    BitCursor cursor_;
    ArithDecoder arith_;
    ThresholdState threshold_;
    CountTable counts_;
    bool done_ = false;
};

// Container: "ETC1", one flags byte (bit 0 = censor rule, others zero), then
// the payload packed MSB-first and zero padded.
inline constexpr std::array<std::uint8_t, 4> kContainerMagic{'E', 'T', 'C', '1'};

struct EncodedContainer {
    CensorRule rule = CensorRule::rank;
    BitString payload;

    [[nodiscard]] std::vector<std::uint8_t> to_bytes() const;
    // Throws DecodeError(bad_magic | truncated | unknown_flags).
    [[nodiscard]] static EncodedContainer parse(std::span<const std::uint8_t> bytes);
};

// Throws std::invalid_argument if msg contains 0.
[[nodiscard]] EncodedContainer encode(std::span<const Symbol> msg, CensorRule rule = CensorRule::rank);
[[nodiscard]] Message decode(const EncodedContainer& container);
[[nodiscard]] Message decode(std::span<const std::uint8_t> bytes);

[[nodiscard]] CodelengthReport codelength_report(std::span<const Symbol> msg,
                                                 CensorRule rule = CensorRule::rank);

}  // namespace etac
