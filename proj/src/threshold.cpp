#include "etac/threshold.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace etac {

Symbol ThresholdState::second_smallest() const noexcept {
    // Children of the root of a binary min-heap.
    if (heap_.size() == 2) return heap_[1];
    return std::min(heap_[1], heap_[2]);
}

void ThresholdState::observe(Symbol x) {
    if (x == 0) throw std::invalid_argument("ThresholdState::observe: symbol 0 is reserved");
    ++observed_;
    heap_.push_back(x);
    std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
    // Pops at most once: M never decreases.
    while (heap_.size() >= 2 && second_smallest() < heap_.size()) {
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
        heap_.pop_back();
    }
}

ThresholdValue brute_force_threshold(std::span<const Symbol> prefix) {
    if (prefix.empty()) return {};
    std::vector<Symbol> sorted(prefix.begin(), prefix.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>{});
    for (std::size_t k = 1; k <= sorted.size(); ++k) {
        if (sorted[k - 1] <= k) return {k, sorted[k - 1]};
    }
    return {sorted.size(), sorted.back()};
}

}  // namespace etac
