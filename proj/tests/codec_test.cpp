#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "etac/codec.hpp"
#include "etac/elias.hpp"
#include "etac/errors.hpp"

namespace etac {
namespace {

DecodeErrorKind decode_error_kind(std::span<const std::uint8_t> bytes) {
    try {
        (void)decode(bytes);
    } catch (const DecodeError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "decode succeeded";
    return DecodeErrorKind::corrupt;
}

TEST(Codec, EmptyMessage) {
    const auto container = encode(Message{});
    EXPECT_LE(container.payload.bytes().size(), 1u);
    // Escape over {0} costs only the two flush bits, then Elias(1) = "1".
    EXPECT_EQ(container.payload.to_text(), "011");
    EXPECT_TRUE(decode(container).empty());

    const auto report = codelength_report(Message{});
    EXPECT_EQ(report.censored, 0u);
    EXPECT_EQ(report.elias_bits, 1u);
    EXPECT_EQ(report.mixture_bits, 2u);
    EXPECT_EQ(report.ideal_mixture_bits, 0.0);
}

TEST(Codec, WorkedMessageRankRule) {
    const Message msg{5, 1, 3, 2, 2};
    const auto report = codelength_report(msg, CensorRule::rank);
    EXPECT_EQ(report.censored, 2u);
    EXPECT_EQ(report.final_m, 3u);
    // Elias stream: excesses 6 and 2, then the terminator.
    EXPECT_EQ(report.elias_bits, elias_length(6) + elias_length(2) + elias_length(1));
    EXPECT_EQ(report.total_bits, report.mixture_bits + report.elias_bits);
    EXPECT_EQ(decode(encode(msg, CensorRule::rank)), msg);
}

TEST(Codec, WorkedMessageTrace) {
    // Step through the encoder to check which positions escape.
    const Message msg{5, 1, 3, 2, 2};
    Encoder enc(CensorRule::rank);
    const std::vector<std::size_t> censored_after{1, 1, 2, 2, 2};
    const std::vector<std::uint64_t> threshold_before{0, 1, 2, 3, 3};
    for (std::size_t i = 0; i < msg.size(); ++i) {
        EXPECT_EQ(enc.active_threshold(), threshold_before[i]);
        enc.push(msg[i]);
        EXPECT_EQ(enc.report().censored, censored_after[i]);
    }
}

TEST(Codec, AllOnesModels) {
    // Models (1), (1,3), (1,5), (1,7): escape, x2, x3, terminator escape.
    const Message msg{1, 1, 1};
    const auto report = codelength_report(msg);
    EXPECT_EQ(report.censored, 1u);
    const double expected = 0.0 + std::log2(4.0 / 3.0) + std::log2(6.0 / 5.0) + std::log2(8.0);
    EXPECT_NEAR(report.ideal_mixture_bits, expected, 1e-12);
    EXPECT_EQ(report.elias_bits, elias_length(2) + elias_length(1));
    EXPECT_EQ(decode(encode(msg)), msg);
}

TEST(Codec, ValueRuleWorkedMessage) {
    const Message msg{5, 1, 3, 2, 2};
    const auto container = encode(msg, CensorRule::value);
    EXPECT_EQ(container.rule, CensorRule::value);
    EXPECT_EQ(decode(container), msg);
    // tau_0..tau_4 = 0,5,1,1,2: escapes at x1 = 5, x3 = 3 and x4 = 2.
    EXPECT_EQ(codelength_report(msg, CensorRule::value).censored, 3u);
}

TEST(Codec, RejectsReservedSymbol) {
    EXPECT_THROW((void)encode(Message{3, 0, 1}), std::invalid_argument);
    EXPECT_THROW((void)encode(Message{kMaxSymbol + 1}), std::invalid_argument);
}

TEST(Codec, FlagsByteSelectsRule) {
    const Message msg{9, 4, 4, 7, 1, 2, 8, 8, 3};
    for (CensorRule rule : {CensorRule::rank, CensorRule::value}) {
        const auto bytes = encode(msg, rule).to_bytes();
        ASSERT_EQ(bytes[4], static_cast<std::uint8_t>(rule));
        EXPECT_EQ(decode(bytes), msg);
    }
}

TEST(Codec, ContainerErrors) {
    auto bytes = encode(Message{4, 4, 2, 9, 1}).to_bytes();

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_EQ(decode_error_kind(bad_magic), DecodeErrorKind::bad_magic);
    EXPECT_EQ(decode_error_kind(std::vector<std::uint8_t>{'E', 'T'}), DecodeErrorKind::bad_magic);
    EXPECT_EQ(decode_error_kind(std::vector<std::uint8_t>{'E', 'T', 'C', '1'}), DecodeErrorKind::truncated);

    auto bad_flags = bytes;
    bad_flags[4] = 0x02;
    EXPECT_EQ(decode_error_kind(bad_flags), DecodeErrorKind::unknown_flags);

    auto trailing = bytes;
    trailing.push_back(0x00);
    EXPECT_EQ(decode_error_kind(trailing), DecodeErrorKind::trailing_garbage);

    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_EQ(decode_error_kind(truncated), DecodeErrorKind::truncated);
}

TEST(Codec, NonzeroPaddingRejected) {
    const auto container = encode(Message{2, 2, 2});
    auto bytes = container.to_bytes();
    const std::size_t pad = container.payload.bytes().size() * 8 - container.payload.size();
    ASSERT_GT(pad, 0u);
    bytes.back() |= 1u;
    EXPECT_EQ(decode_error_kind(bytes), DecodeErrorKind::trailing_garbage);
}

TEST(Codec, ValueRuleAlphabetLimit) {
    EXPECT_THROW((void)encode(Message{std::uint64_t{1} << 31, 5}, CensorRule::value), std::length_error);
    // The rank rule never builds alphabets larger than the message.
    const Message ok{std::uint64_t{1} << 31, 5};
    EXPECT_EQ(decode(encode(ok, CensorRule::rank)), ok);
}

Message random_message(std::mt19937_64& rng) {
    Message msg(rng() % 400);
    const int kind = static_cast<int>(rng() % 5);
    for (std::size_t i = 0; i < msg.size(); ++i) {
        const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
        switch (kind) {
            case 0: msg[i] = static_cast<Symbol>(std::min(1e15, 1.0 / (u * u))) | 1u; break;
            case 1: msg[i] = 1 + static_cast<Symbol>(-std::log(u) * 3); break;
            case 2: msg[i] = 7; break;
            case 3: msg[i] = i + 1; break;
            default: msg[i] = 1 + rng() % 30; break;
        }
    }
    if (!msg.empty() && rng() % 3 == 0) msg[rng() % msg.size()] = 1'000'000'000;
    return msg;
}

TEST(CodecProperty, RoundTripBothRules) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 400; ++trial) {
        const Message msg = random_message(rng);
        for (CensorRule rule : {CensorRule::rank, CensorRule::value}) {
            const auto container = encode(msg, rule);
            ASSERT_EQ(decode(container.to_bytes()), msg) << "trial " << trial;
            const auto report = codelength_report(msg, rule);
            ASSERT_EQ(report.total_bits, container.payload.size());
            ASSERT_LE(static_cast<double>(report.mixture_bits),
                      report.ideal_mixture_bits + 2.0 * static_cast<double>(report.censored + 1) + 1e-9);
        }
    }
}

TEST(CodecProperty, EncoderIsCausal) {
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 100; ++trial) {
        const Message a = random_message(rng);
        Message b(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(rng() % (a.size() + 1)));
        const std::size_t common = b.size();
        for (int k = 0; k < 20; ++k) b.push_back(1 + rng() % 50);

        Encoder ea, eb;
        for (std::size_t i = 0; i < common; ++i) {
            ea.push(a[i]);
            eb.push(b[i]);
        }
        ASSERT_EQ(ea.bits(), eb.bits());
        const BitString prefix = ea.bits();
        for (std::size_t i = common; i < a.size(); ++i) ea.push(a[i]);
        ea.finish();
        const auto batch = encode(a);
        ASSERT_EQ(ea.bits(), batch.payload);
        for (std::size_t i = 0; i < prefix.size(); ++i) ASSERT_EQ(batch.payload[i], prefix[i]);
    }
}

TEST(CodecProperty, DecoderTracksEncoderThreshold) {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 100; ++trial) {
        const Message msg = random_message(rng);
        for (CensorRule rule : {CensorRule::rank, CensorRule::value}) {
            Encoder enc(rule);
            std::vector<ThresholdState> states;
            for (Symbol x : msg) {
                enc.push(x);
                states.push_back(enc.threshold());
            }
            enc.finish();
            Decoder dec(enc.bits(), rule);
            for (std::size_t i = 0; i < msg.size(); ++i) {
                ASSERT_EQ(dec.next(), msg[i]);
                ASSERT_EQ(dec.threshold(), states[i]);
            }
            ASSERT_EQ(dec.next(), std::nullopt);
            dec.check_padding();
        }
    }
}

}  // namespace
}  // namespace etac
