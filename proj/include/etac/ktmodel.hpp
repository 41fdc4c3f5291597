#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "etac/symbol.hpp"

namespace etac {

class KtWeights;

// Occurrence counts n^j over the whole prefix, censored occurrences
// included, so a symbol that later enters the alphabet arrives with its
// history. Symbol 0 is never counted.
class CountTable {
public:
    // Alphabets up to this limit use the Fenwick tree; larger ones (only
    // reachable under the value censor rule) walk the ordered map.
    static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 22;

    // Throws std::invalid_argument on j == 0.
    void record(Symbol j);

    [[nodiscard]] std::uint64_t count(Symbol j) const;
    [[nodiscard]] std::uint64_t observed() const noexcept { return observed_; }
    [[nodiscard]] std::size_t distinct() const noexcept { return counts_.size(); }
    [[nodiscard]] const std::map<Symbol, std::uint64_t>& counts() const noexcept { return counts_; }

    // S = sum of n^j for 1 <= j <= limit.
    [[nodiscard]] std::uint64_t in_alphabet_total(std::uint64_t limit) const;

    // KT predictive weights over {0, ..., limit}: weight(j) = 2 n^j + 1,
    // weight(0) = 1, total = 2 S + limit + 1. May grow the Fenwick tree.
    // The view is invalidated by the next record().
    [[nodiscard]] KtWeights predictive(std::uint64_t limit);

private:
    friend class KtWeights;

    void ensure_dense(std::uint64_t limit);
    // Sum of weights 2 n^j + 1 over 1 <= j <= x (x <= dense_cap_).
    [[nodiscard]] std::uint64_t weight_prefix(std::uint64_t x) const;
    // Largest x <= dense_cap_ with weight_prefix(x) <= budget.
    [[nodiscard]] std::uint64_t weight_search(std::uint64_t budget) const;
    [[nodiscard]] std::uint64_t count_prefix_sparse(std::uint64_t limit) const;

    std::map<Symbol, std::uint64_t> counts_;
    std::vector<std::uint64_t> tree_{0};  // 1-based Fenwick tree over weights
    std::uint64_t dense_cap_ = 0;
    std::uint64_t observed_ = 0;
};

// Satisfies WeightModel.
class KtWeights {
public:
    [[nodiscard]] std::uint64_t alphabet_size() const noexcept { return limit_ + 1; }
    [[nodiscard]] std::uint64_t total() const noexcept { return total_; }
    [[nodiscard]] std::uint64_t weight(std::uint64_t j) const;
    [[nodiscard]] std::uint64_t cumulative(std::uint64_t j) const;
    [[nodiscard]] std::uint64_t find(std::uint64_t target) const;
    [[nodiscard]] std::uint64_t limit() const noexcept { return limit_; }

private:
    friend class CountTable;
    KtWeights(const CountTable& table, std::uint64_t limit, std::uint64_t total, bool dense)
        : table_(&table), limit_(limit), total_(total), dense_(dense) {}

    const CountTable* table_;
    std::uint64_t limit_;
    std::uint64_t total_;
    bool dense_;
};

}  // namespace etac
