#pragma once

#include <catch_amalgamated.hpp>

#include "qwal/numeric.hpp"

template <>
struct Catch::StringMaker<qwal::ExtReal> {
  static std::string convert(const qwal::ExtReal& v) { return v.str(); }
};
