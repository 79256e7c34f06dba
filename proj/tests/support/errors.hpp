#pragma once

#include <optional>

#include "fracwave/error.hpp"

namespace testing_support {

/// Error code raised by fn(), or nullopt when it returns normally.
template <class Fn>
std::optional<fracwave::Errc> error_code(Fn&& fn) {
    try {
        fn();
    } catch (const fracwave::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace testing_support
