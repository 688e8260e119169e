#pragma once

#include "ptbox/error.hpp"

#include <doctest.h>

#include <functional>
#include <optional>

namespace check {

// Code of the ptbox::Error thrown by f, or nullopt if nothing was thrown.
inline std::optional<ptbox::Errc> errc_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ptbox::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace check
