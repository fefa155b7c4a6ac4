#pragma once

#include <functional>

namespace bbcpl {

/// Bisection for a sign change of f on [lo, hi]. Throws NotFoundError when
/// f(lo) and f(hi) share a sign. Stops at floating-point resolution.
[[nodiscard]] double bisect(const std::function<double(double)>& f, double lo, double hi);

/// Grows [lo, hi] geometrically (factor 2, up to max_doublings) until f changes
/// sign across it, then bisects. The interval is scaled about zero, so an
/// asymmetric seed such as (-1, 0.75) never evaluates f exactly at zero.
[[nodiscard]] double bracket_and_bisect(const std::function<double(double)>& f, double lo, double hi,
                                        int max_doublings = 40);

} // namespace bbcpl
