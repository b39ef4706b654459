#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "euii/errors.hpp"

namespace euii::detail {

// Root of a monotone f on [lo, hi]; f(lo) and f(hi) must differ in sign.
// TOMS 748 keeps a bracket at every step, so it cannot leave [lo, hi].
template <class F>
double solve_bracketed(F&& f, double lo, double hi, const char* what, double x_tol = 1e-13,
                       std::uintmax_t max_iter = 200)
{
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw NumericError(std::string(what) + ": root is not bracketed");
    }
    std::uintmax_t iter = max_iter;
    auto tol = [x_tol](double a, double b) { return std::abs(b - a) <= x_tol * (1.0 + std::abs(a)); };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iter);
    if (iter >= max_iter) {
        throw NumericError(std::string(what) + ": root finder did not converge");
    }
    return 0.5 * (a + b);
}

}  // namespace euii::detail
