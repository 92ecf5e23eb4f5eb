#pragma once

#include <cstdio>
#include <string>

namespace mq {

// 17 significant digits: doubles round-trip bit-exactly, so identical runs
// produce byte-identical files.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace mq
