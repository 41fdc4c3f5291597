#include "etac/ktmodel.hpp"

#include <bit>
#include <stdexcept>

namespace etac {

void CountTable::record(Symbol j) {
    if (j == 0) throw std::invalid_argument("CountTable::record: escape symbol is never counted");
    ++counts_[j];
    ++observed_;
    if (j <= dense_cap_) {
        for (std::uint64_t i = j; i <= dense_cap_; i += i & (~i + 1)) tree_[i] += 2;
    }
}

std::uint64_t CountTable::count(Symbol j) const {
    auto it = counts_.find(j);
    return it == counts_.end() ? 0 : it->second;
}

std::uint64_t CountTable::in_alphabet_total(std::uint64_t limit) const {
    if (limit <= dense_cap_) return (weight_prefix(limit) - limit) / 2;
    return count_prefix_sparse(limit);
}

std::uint64_t CountTable::count_prefix_sparse(std::uint64_t limit) const {
    std::uint64_t sum = 0;
    for (auto it = counts_.begin(); it != counts_.end() && it->first <= limit; ++it) sum += it->second;
    return sum;
}

void CountTable::ensure_dense(std::uint64_t limit) {
    if (limit <= dense_cap_) return;
    const std::uint64_t cap = std::bit_ceil(limit < 64 ? std::uint64_t{64} : limit);
    tree_.assign(cap + 1, 0);
    for (std::uint64_t i = 1; i <= cap; ++i) tree_[i] = 1;
    for (auto it = counts_.begin(); it != counts_.end() && it->first <= cap; ++it) {
        tree_[it->first] += 2 * it->second;
    }
    // Linear-time Fenwick construction.
    for (std::uint64_t i = 1; i <= cap; ++i) {
        const std::uint64_t parent = i + (i & (~i + 1));
        if (parent <= cap) tree_[parent] += tree_[i];
    }
    dense_cap_ = cap;
}

std::uint64_t CountTable::weight_prefix(std::uint64_t x) const {
    std::uint64_t sum = 0;
    for (; x > 0; x &= x - 1) sum += tree_[x];
    return sum;
}

std::uint64_t CountTable::weight_search(std::uint64_t budget) const {
    std::uint64_t pos = 0;
    for (std::uint64_t step = dense_cap_; step > 0; step >>= 1) {
        if (pos + step <= dense_cap_ && tree_[pos + step] <= budget) {
            pos += step;
            budget -= tree_[pos];
        }
    }
    return pos;
}

KtWeights CountTable::predictive(std::uint64_t limit) {
    if (limit <= kDenseLimit) {
        ensure_dense(limit);
        return KtWeights(*this, limit, 1 + weight_prefix(limit), true);
    }
    return KtWeights(*this, limit, limit + 1 + 2 * count_prefix_sparse(limit), false);
}

std::uint64_t KtWeights::weight(std::uint64_t j) const {
    if (j > limit_) throw std::out_of_range("KtWeights::weight: symbol outside alphabet");
    return j == 0 ? 1 : 2 * table_->count(j) + 1;
}

std::uint64_t KtWeights::cumulative(std::uint64_t j) const {
    if (j > limit_ + 1) throw std::out_of_range("KtWeights::cumulative: symbol outside alphabet");
    if (j == 0) return 0;
    if (dense_) return 1 + table_->weight_prefix(j - 1);
    return j + 2 * table_->count_prefix_sparse(j - 1);
}

std::uint64_t KtWeights::find(std::uint64_t target) const {
    if (target == 0) return 0;
    if (dense_) return table_->weight_search(target - 1) + 1;
    // Symbols between recorded keys all have weight 1, so
    // cumulative(j) = j + 2 * (counts of keys below j).
    std::uint64_t acc = 0;
    for (const auto& [key, n] : table_->counts_) {
        if (key > limit_) break;
        if (target < key + acc) return target - acc;
        if (target < key + acc + 2 * n + 1) return key;
        acc += 2 * n;
    }
    return target - acc;
}

}  // namespace etac
