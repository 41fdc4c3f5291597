#pragma once

#include <stdexcept>
#include <string>

namespace etac {

enum class DecodeErrorKind {
    truncated,         // ran past the end of the payload
    corrupt,           // payload is inconsistent with the model
    bad_magic,         // container does not start with "ETC1"
    unknown_flags,     // reserved flag bits set
    trailing_garbage,  // non-padding bits after the terminator
};

const char* to_string(DecodeErrorKind kind) noexcept;

class DecodeError : public std::runtime_error {
public:
    DecodeError(DecodeErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] DecodeErrorKind kind() const noexcept { return kind_; }

private:
    DecodeErrorKind kind_;
};

}  // namespace etac
