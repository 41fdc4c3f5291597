#pragma once

#include <cstdint>
#include <vector>

namespace etac {

// Message symbols are positive integers; 0 is reserved for the escape and
// terminator of the mixture-coded stream.
using Symbol = std::uint64_t;
using Message = std::vector<Symbol>;

// Largest symbol accepted anywhere in the library.
inline constexpr Symbol kMaxSymbol = Symbol{1} << 62;

}  // namespace etac
