#pragma once

#include <charconv>
#include <string>

namespace mrm {

/// Shortest round-trip decimal form of a double. Locale independent, so
/// CSV bytes are a pure function of the values written.
inline std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace mrm
