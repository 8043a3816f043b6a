#pragma once

#include <algorithm>
#include <cmath>

namespace qgs::detail {

/// Locates the switch point of a predicate that holds at lo and fails at hi.
/// Neither endpoint is evaluated. Stops at relative width 1e-14 or when the
/// midpoint no longer moves.
template <class Pred>
double bisect_transition(Pred&& holds, double lo, double hi) {
  for (int it = 0; it < 400; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-14 * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
    if (holds(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

/// Root of f on [lo, hi] given f(lo), f(hi) of opposite sign.
template <class F>
double bisect_root(F&& f, double lo, double hi) {
  const bool lo_negative = f(lo) < 0;
  return bisect_transition([&](double z) {
    const auto v = f(z);
    if (v == 0) return false;
    return (v < 0) == lo_negative;
  }, lo, hi);
}

}  // namespace qgs::detail
