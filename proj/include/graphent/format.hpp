#pragma once

#include <cstdio>
#include <string>

namespace graphent {

/// Round-trippable, locale-independent rendering used by every CSV/JSON writer.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace graphent
