#pragma once

#include <cstdio>
#include <string>

namespace ulln {

// All floats in files and reports are printed with 17 significant digits so
// that serialization round-trips exactly and output is byte-deterministic.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace ulln
