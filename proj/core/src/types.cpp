#include "euii/types.hpp"

namespace euii {

std::string_view to_string(Arms arms)
{
    return arms == Arms::one ? "one" : "two";
}

std::string_view to_string(Sidedness sided)
{
    return sided == Sidedness::one ? "one" : "two";
}

std::string_view to_string(TestFamily test)
{
    return test == TestFamily::z ? "z" : "t";
}

}  // namespace euii
