#include "bbcpl/roots.hpp"

#include "bbcpl/errors.hpp"

#include <cmath>
#include <limits>

namespace bbcpl {

double bisect(const std::function<double(double)>& f, double lo, double hi)
{
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    if (std::signbit(f_lo) == std::signbit(f_hi)) {
        throw NotFoundError("bisect: no sign change on the interval");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double f_mid = f(mid);
        if (f_mid == 0.0) {
            return mid;
        }
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double bracket_and_bisect(const std::function<double(double)>& f, double lo, double hi, int max_doublings)
{
    for (int i = 0; i <= max_doublings; ++i) {
        const double f_lo = f(lo);
        const double f_hi = f(hi);
        if (std::signbit(f_lo) != std::signbit(f_hi) || f_lo == 0.0 || f_hi == 0.0) {
            return bisect(f, lo, hi);
        }
        lo *= 2.0;
        hi *= 2.0;
    }
    throw NotFoundError("bracket_and_bisect: no sign change found");
}

} // namespace bbcpl
