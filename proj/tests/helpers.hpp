#pragma once

#include <doctest.h>

#include "riskalloc/error.hpp"
#include "riskalloc/experiments.hpp"

// Asserts that `expr` throws riskalloc::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                       \
  do {                                                              \
    bool threw_ = false;                                            \
    try {                                                           \
      (void)(expr);                                                 \
    } catch (const riskalloc::Error& e_) {                          \
      threw_ = true;                                                \
      CHECK(e_.kind() == (expected_kind));                          \
    }                                                               \
    CHECK_MESSAGE(threw_, "expected riskalloc::Error from " #expr); \
  } while (0)

namespace testing {

inline const riskalloc::Preset& robotarium() {
  static const riskalloc::Preset preset = riskalloc::robotarium_preset();
  return preset;
}

inline riskalloc::IntMatrix reference(const std::string& name) {
  for (const auto& [label, alloc] : robotarium().references) {
    if (label == name) return alloc.assignment();
  }
  FAIL("no reference allocation " << name);
  return {};
}

}  // namespace testing
