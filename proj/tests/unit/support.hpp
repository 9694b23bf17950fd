#pragma once

#include <functional>

#include "doctest.h"
#include "flatdio/errors.hpp"

// Kind of the Error raised by f; fails the test when nothing is raised.
inline flatdio::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const flatdio::Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return flatdio::ErrorKind::ConfigError;
}
