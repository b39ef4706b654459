#pragma once

#include <string_view>

#include "euii/errors.hpp"

namespace euii {

/// A probability in [0, 1]. Construction checks the range.
class Probability {
public:
    constexpr Probability() = default;
    explicit Probability(double value) : value_(value)
    {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw DomainError("probability outside [0, 1]");
        }
    }

    constexpr double value() const { return value_; }
    constexpr operator double() const { return value_; }

private:
    double value_ = 0.0;
};

enum class Arms { one, two };
enum class Sidedness { one, two };
enum class TestFamily { z, t };

/// One-tail level used for the critical value: alpha/2 for two-sided tests.
inline double one_tail_level(double alpha, Sidedness sided)
{
    return sided == Sidedness::two ? alpha / 2.0 : alpha;
}

std::string_view to_string(Arms arms);
std::string_view to_string(Sidedness sided);
std::string_view to_string(TestFamily test);

}  // namespace euii
