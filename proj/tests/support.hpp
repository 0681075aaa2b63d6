#pragma once

#include <functional>

#include "doctest.h"
#include "nonbayes/belief.hpp"
#include "nonbayes/errors.hpp"

namespace testsupport {

inline nonbayes::Environment binary_symmetric() {
    return nonbayes::Environment(
        nonbayes::Belief({0.5, 0.5}),
        nonbayes::SignalModel({"H", "L"}, {{0.8, 0.2}, {0.2, 0.8}}));
}

inline nonbayes::Environment ternary_peaked() {
    const double third = 1.0 / 3.0;
    return nonbayes::Environment(
        nonbayes::Belief({third, third, third}),
        nonbayes::SignalModel({"s1", "s2", "s3"}, {{0.6, 0.2, 0.2},
                                                   {0.2, 0.6, 0.2},
                                                   {0.2, 0.2, 0.6}}));
}

/// Runs `fn`, requires it to throw nonbayes::Error, and returns the code.
inline nonbayes::Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const nonbayes::Error& e) {
        return e.code();
    }
    FAIL("expected a nonbayes::Error");
    return nonbayes::Errc::ParseError;
}

} // namespace testsupport
