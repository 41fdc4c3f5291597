#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "etac/symbol.hpp"

namespace etac {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// Malformed token in an input file; what() carries line, column and token.
class TokenError : public std::runtime_error {
public:
    TokenError(std::size_t line, std::size_t column, std::string token, std::string reason);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }
    [[nodiscard]] const std::string& token() const noexcept { return token_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string token_;
};

// Whitespace-separated decimal integers in 1..kMaxSymbol.
[[nodiscard]] Message parse_tokens(std::string_view text);
// Single space separated, trailing newline; empty message gives "".
[[nodiscard]] std::string format_tokens(const Message& msg);

// "1024..65536" (doubling), "100,200,400" or "5000". Throws std::invalid_argument.
[[nodiscard]] std::vector<std::size_t> parse_n_grid(std::string_view text);

// Writes through a temporary file and rename; std::runtime_error names the path.
void write_file_atomic(const std::string& path, std::string_view data);
[[nodiscard]] std::string read_file(const std::string& path);

int run_cli(int argc, char** argv);

}  // namespace etac
