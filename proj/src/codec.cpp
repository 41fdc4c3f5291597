#include "etac/codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "etac/elias.hpp"
#include "etac/errors.hpp"

namespace etac {

std::string_view to_string(CensorRule rule) noexcept {
    return rule == CensorRule::rank ? "rank" : "value";
}

CensorRule parse_censor_rule(std::string_view text) {
    if (text == "rank") return CensorRule::rank;
    if (text == "value") return CensorRule::value;
    throw std::invalid_argument("unknown censor rule '" + std::string(text) + "'");
}

std::uint64_t Encoder::active_threshold() const noexcept {
    return rule_ == CensorRule::rank ? threshold_.size() : threshold_.tau();
}

void Encoder::push(Symbol x) {
    if (finished_) throw std::logic_error("Encoder::push after finish");
    if (x == 0) throw std::invalid_argument("symbol 0 is reserved for the terminator");
    if (x > kMaxSymbol) throw std::invalid_argument("symbol exceeds 2^62");
    code(x);
}

void Encoder::finish() {
    if (finished_) throw std::logic_error("Encoder::finish called twice");
    code(0);
    finished_ = true;
    report_.total_bits = bits_.size();
}

void Encoder::code(Symbol x) {
    const std::uint64_t limit = active_threshold();
    const KtWeights model = counts_.predictive(limit);
    if (model.total() >= kMaxModelTotal) {
        throw std::length_error("mixture alphabet exceeds arithmetic coder precision");
    }
    const bool censored = x == 0 || x > limit;
    const Symbol coded = censored ? 0 : x;

    std::size_t before = bits_.size();
    arith_.encode(model, coded, bits_);
    report_.ideal_mixture_bits +=
        std::log2(static_cast<double>(model.total())) - std::log2(static_cast<double>(model.weight(coded)));
    if (censored) {
        arith_.flush(bits_);
        report_.mixture_bits += bits_.size() - before;
        before = bits_.size();
        elias_encode(x == 0 ? 1 : x - limit + 1, bits_);
        report_.elias_bits += bits_.size() - before;
        if (x != 0) ++report_.censored;
    } else {
        report_.mixture_bits += bits_.size() - before;
    }

    if (x != 0) {
        counts_.record(x);
        threshold_.observe(x);
        ++report_.symbols;
    }
    report_.final_m = threshold_.size();
    report_.final_tau = threshold_.tau();
    report_.total_bits = bits_.size();
}

std::uint64_t Decoder::active_threshold() const noexcept {
    return rule_ == CensorRule::rank ? threshold_.size() : threshold_.tau();
}

void Decoder::accept(Symbol x) {
    counts_.record(x);
    threshold_.observe(x);
}

std::optional<Symbol> Decoder::next() {
    if (done_) return std::nullopt;
    const std::uint64_t limit = active_threshold();
    const KtWeights model = counts_.predictive(limit);
    if (model.total() >= kMaxModelTotal) {
        throw DecodeError(DecodeErrorKind::corrupt, "mixture alphabet exceeds coder precision");
    }
    const Symbol s = arith_.decode(model, cursor_);
    if (s != 0) {
        accept(s);
        return s;
    }
    arith_.finish_block(cursor_);
    const std::uint64_t excess = elias_decode(cursor_);
    if (excess == 1) {
        done_ = true;
        return std::nullopt;
    }
    if (excess - 1 > kMaxSymbol - limit) {
        throw DecodeError(DecodeErrorKind::corrupt, "escaped symbol out of range");
    }
    const Symbol x = excess - 1 + limit;
    accept(x);
    return x;
}

void Decoder::check_padding() const {
    if (!done_) throw std::logic_error("Decoder::check_padding before terminator");
    const BitString& bits = cursor_.source();
    if (bits.size() - cursor_.position() >= 8) {
        throw DecodeError(DecodeErrorKind::trailing_garbage, "data after terminator");
    }
    for (std::size_t i = cursor_.position(); i < bits.size(); ++i) {
        if (bits[i]) throw DecodeError(DecodeErrorKind::trailing_garbage, "nonzero padding after terminator");
    }
}

std::vector<std::uint8_t> EncodedContainer::to_bytes() const {
    std::vector<std::uint8_t> out(kContainerMagic.begin(), kContainerMagic.end());
    out.push_back(static_cast<std::uint8_t>(rule));
    out.insert(out.end(), payload.bytes().begin(), payload.bytes().end());
    return out;
}

EncodedContainer EncodedContainer::parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kContainerMagic.size() ||
        !std::equal(kContainerMagic.begin(), kContainerMagic.end(), bytes.begin())) {
        throw DecodeError(DecodeErrorKind::bad_magic, "not an ETC1 container");
    }
    if (bytes.size() < kContainerMagic.size() + 1) {
        throw DecodeError(DecodeErrorKind::truncated, "container has no flags byte");
    }
    const std::uint8_t flags = bytes[kContainerMagic.size()];
    if ((flags & ~std::uint8_t{1}) != 0) {
        throw DecodeError(DecodeErrorKind::unknown_flags, "unknown container flags");
    }
    EncodedContainer out;
    out.rule = static_cast<CensorRule>(flags & 1u);
    out.payload = BitString::from_bytes(bytes.subspan(kContainerMagic.size() + 1));
    return out;
}

EncodedContainer encode(std::span<const Symbol> msg, CensorRule rule) {
    Encoder encoder(rule);
    for (Symbol x : msg) encoder.push(x);
    encoder.finish();
    return EncodedContainer{rule, encoder.bits()};
}

Message decode(const EncodedContainer& container) {
    Decoder decoder(container.payload, container.rule);
    Message out;
    while (auto s = decoder.next()) out.push_back(*s);
    decoder.check_padding();
    return out;
}

Message decode(std::span<const std::uint8_t> bytes) {
    return decode(EncodedContainer::parse(bytes));
}

CodelengthReport codelength_report(std::span<const Symbol> msg, CensorRule rule) {
    Encoder encoder(rule);
    for (Symbol x : msg) encoder.push(x);
    encoder.finish();
    return encoder.report();
}

}  // namespace etac
