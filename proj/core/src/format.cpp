#include "euii/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace euii {

std::string format_exact(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buffer{};
    const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), result.ptr);
}

std::string format_significant(double value, int digits)
{
    if (!std::isfinite(value)) {
        return format_exact(value);
    }
    std::array<char, 64> buffer{};
    std::snprintf(buffer.data(), buffer.size(), "%.*g", digits, value);
    return buffer.data();
}

}  // namespace euii
