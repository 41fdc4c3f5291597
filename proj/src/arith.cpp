#include "etac/arith.hpp"

#include <algorithm>
#include <stdexcept>

#include "etac/errors.hpp"

namespace etac {

namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t scale(std::uint64_t range, std::uint64_t cum, std::uint64_t total) {
    return static_cast<std::uint64_t>(static_cast<u128>(range) * cum / total);
}

}  // namespace

DenseWeights::DenseWeights(std::vector<std::uint64_t> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("DenseWeights: empty alphabet");
    prefix_.reserve(weights_.size() + 1);
    prefix_.push_back(0);
    for (std::uint64_t w : weights_) {
        if (w == 0) throw std::invalid_argument("DenseWeights: zero weight");
        prefix_.push_back(prefix_.back() + w);
        if (prefix_.back() >= kMaxModelTotal) {
            throw std::invalid_argument("DenseWeights: total exceeds coder precision");
        }
    }
}

std::uint64_t DenseWeights::find(std::uint64_t target) const {
    auto it = std::upper_bound(prefix_.begin(), prefix_.end(), target);
    return static_cast<std::uint64_t>(it - prefix_.begin()) - 1;
}

void ArithEncoder::check_symbol(std::uint64_t symbol, std::uint64_t alphabet_size) {
    if (symbol >= alphabet_size) throw std::logic_error("ArithEncoder: symbol outside alphabet");
}

void ArithEncoder::emit(bool bit, BitString& out) {
    out.push_back(bit);
    for (; pending_ > 0; --pending_) out.push_back(!bit);
}

void ArithEncoder::encode_range(std::uint64_t cum, std::uint64_t weight, std::uint64_t total,
                                BitString& out) {
    if (weight == 0 || total == 0 || cum + weight > total || total >= kMaxModelTotal) {
        throw std::logic_error("ArithEncoder: invalid model range");
    }
    using namespace arith;
    const std::uint64_t range = high_ - low_ + 1;
    high_ = low_ + scale(range, cum + weight, total) - 1;
    low_ = low_ + scale(range, cum, total);
    for (;;) {
        if (high_ < kHalf) {
            emit(false, out);
        } else if (low_ >= kHalf) {
            emit(true, out);
            low_ -= kHalf;
            high_ -= kHalf;
        } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
            ++pending_;
            low_ -= kQuarter;
            high_ -= kQuarter;
        } else {
            break;
        }
        low_ <<= 1;
        high_ = (high_ << 1) | 1u;
    }
}

void ArithEncoder::flush(BitString& out) {
    ++pending_;
    emit(low_ >= arith::kQuarter, out);
    low_ = 0;
    high_ = arith::kTop;
    pending_ = 0;
}

void ArithDecoder::corrupt() {
    throw DecodeError(DecodeErrorKind::corrupt, "arithmetic stream inconsistent with model");
}

bool ArithDecoder::next_bit(BitCursor& cursor) {
    if (cursor.at_end()) {
        ++phantom_;
        return false;
    }
    return cursor.read_bit();
}

std::uint64_t ArithDecoder::decode_target(std::uint64_t total, BitCursor& cursor) {
    if (total == 0 || total >= kMaxModelTotal) throw std::logic_error("ArithDecoder: bad total");
    if (!primed_) {
        low_ = 0;
        high_ = arith::kTop;
        value_ = 0;
        phantom_ = 0;
        for (unsigned i = 0; i < arith::kRegisterBits; ++i) value_ = (value_ << 1) | next_bit(cursor);
        primed_ = true;
    }
    if (value_ < low_ || value_ > high_) corrupt();
    const std::uint64_t range = high_ - low_ + 1;
    const u128 offset = static_cast<u128>(value_ - low_ + 1) * total - 1;
    const auto target = static_cast<std::uint64_t>(offset / range);
    if (target >= total) corrupt();
    return target;
}

void ArithDecoder::narrow(std::uint64_t cum, std::uint64_t weight, std::uint64_t total,
                          BitCursor& cursor) {
    using namespace arith;
    const std::uint64_t range = high_ - low_ + 1;
    high_ = low_ + scale(range, cum + weight, total) - 1;
    low_ = low_ + scale(range, cum, total);
    for (;;) {
        if (high_ < kHalf) {
        } else if (low_ >= kHalf) {
            low_ -= kHalf;
            high_ -= kHalf;
            value_ -= kHalf;
        } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
            low_ -= kQuarter;
            high_ -= kQuarter;
            value_ -= kQuarter;
        } else {
            break;
        }
        low_ <<= 1;
        high_ = (high_ << 1) | 1u;
        value_ = (value_ << 1) | next_bit(cursor);
    }
}

void ArithDecoder::finish_block(BitCursor& cursor) {
    if (!primed_) throw std::logic_error("ArithDecoder::finish_block outside a block");
    primed_ = false;
    if (phantom_ > arith::kBlockLookahead) {
        throw DecodeError(DecodeErrorKind::truncated, "arithmetic block truncated");
    }
    cursor.rollback(arith::kBlockLookahead - phantom_);
    phantom_ = 0;
}

}  // namespace etac
