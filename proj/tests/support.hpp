#pragma once

#include "activelab/error.hpp"
#include "doctest.h"

// Asserts that `expr` throws activelab::Error of the given kind.
#define CHECK_THROWS_KIND(expr, k)                                      \
  do {                                                                  \
    bool thrown_ = false;                                               \
    try {                                                               \
      (void)(expr);                                                     \
    } catch (const activelab::Error& e_) {                              \
      thrown_ = true;                                                   \
      CHECK_MESSAGE(e_.kind() == (k), "got " << e_.what());             \
    }                                                                   \
    CHECK_MESSAGE(thrown_, "expected " << activelab::to_string(k));     \
  } while (0)
