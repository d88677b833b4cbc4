#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace hardylab {

// Shortest decimal string that round-trips to the same double. Used anywhere
// output must be byte-reproducible.
inline std::string shortest_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace hardylab
