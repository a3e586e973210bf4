#pragma once

#include <string>

namespace slitflow {

/// Locale-free rendering with 17 significant digits; round-trips exactly.
std::string format_double(double x);

}  // namespace slitflow
