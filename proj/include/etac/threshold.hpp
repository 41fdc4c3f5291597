#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "etac/symbol.hpp"

namespace etac {

// Expanding threshold over a growing prefix x_1..x_i:
//   M_i = min(i, min{k : x_{k,i} <= k}),  tau_i = x_{M_i,i}
// where x_{k,i} is the k-th largest symbol of the prefix. The heap holds
// exactly the M_i largest symbols, so tau is its minimum.
class ThresholdState {
public:
    // Throws std::invalid_argument on x == 0.
    void observe(Symbol x);

    [[nodiscard]] std::size_t size() const noexcept { return heap_.size(); }  // M_i
    [[nodiscard]] Symbol tau() const noexcept { return heap_.empty() ? 0 : heap_.front(); }
    [[nodiscard]] std::size_t observed() const noexcept { return observed_; }

    // Retained symbols in heap order.
    [[nodiscard]] std::span<const Symbol> retained() const noexcept { return heap_; }

    friend bool operator==(const ThresholdState& a, const ThresholdState& b) {
        return a.observed_ == b.observed_ && a.heap_ == b.heap_;
    }

private:
    [[nodiscard]] Symbol second_smallest() const noexcept;

    std::vector<Symbol> heap_;  // min-heap under std::greater
    std::size_t observed_ = 0;
};

struct ThresholdValue {
    std::size_t m = 0;
    Symbol tau = 0;

    friend bool operator==(const ThresholdValue&, const ThresholdValue&) = default;
};

// Reference evaluation straight from the order statistics of the prefix.
// Returns {0, 0} for an empty prefix.
[[nodiscard]] ThresholdValue brute_force_threshold(std::span<const Symbol> prefix);

}  // namespace etac
