#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace cyclesync::detail {

// 15 significant digits; NaN is written as an empty field.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

}  // namespace cyclesync::detail
