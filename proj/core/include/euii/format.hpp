#pragma once

#include <string>

namespace euii {

/// Shortest decimal representation that round-trips to the same double.
std::string format_exact(double value);

/// `digits` significant digits, for human-readable tables.
std::string format_significant(double value, int digits = 6);

}  // namespace euii
