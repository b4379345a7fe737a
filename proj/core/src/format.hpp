#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace fraclab::detail {

// Shortest decimal form that parses back to the same double.
inline std::string shortest(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

}  // namespace fraclab::detail
