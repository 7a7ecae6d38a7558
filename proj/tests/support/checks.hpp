#pragma once

#include <doctest.h>

#include "tsdelay/errors.hpp"

// Asserts that evaluating expr throws TsError with the given code.
#define CHECK_FAILS(expr, expected_code)                         \
    do {                                                         \
        bool caught_expected_ = false;                           \
        try {                                                    \
            (void)(expr);                                        \
        } catch (const tsdelay::TsError& err_) {                 \
            caught_expected_ = true;                             \
            CHECK(err_.code() == (expected_code));               \
        }                                                        \
        CHECK_MESSAGE(caught_expected_, "expected " #expr " to throw"); \
    } while (0)
