#pragma once

#include "ctrig/core.hpp"
#include "ctrig/error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ctrig::testing {

/// Code of the ctrig::Error thrown by fn; records a failure when none is.
inline ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no ctrig::Error thrown";
    return ErrorCode::InvalidArgument;
}

inline std::vector<std::string> names(std::initializer_list<const char*> list) {
    return {list.begin(), list.end()};
}

} // namespace ctrig::testing
