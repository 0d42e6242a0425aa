#pragma once

#include <cmath>

namespace hcl {

struct BisectionSettings {
  double q_max = 10.0;
  /// The upper bracket doubles from q_max up to this value.
  double q_cap = 80.0;
  int max_iterations = 60;
  /// Bracket width at which the search stops.
  double resolution = 1e-9;
};

struct BisectionResult {
  double q = 0.0;
  double achieved = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Finds the smallest q >= 0 at which a non-decreasing step function
/// `coverage(q)` enters the band target +/- tolerance, i.e. the left edge of
/// {q : coverage(q) >= target - tolerance}. Converged means the coverage
/// at that q lies inside the band (a jump can step over it).
template <class Coverage>
BisectionResult bisect_coverage(Coverage&& coverage, double target, double tolerance,
                                const BisectionSettings& settings = {}) {
  const double floor_level = target - tolerance;
  auto in_band = [&](double c) { return c >= floor_level && c <= target + tolerance; };

  BisectionResult r;
  const double at_zero = coverage(0.0);
  if (at_zero >= floor_level) {
    r.q = 0.0;
    r.achieved = at_zero;
    r.converged = in_band(at_zero);
    return r;
  }

  double lo = 0.0;
  double hi = settings.q_max;
  double at_hi = coverage(hi);
  while (at_hi < floor_level && hi < settings.q_cap) {
    lo = hi;
    hi = std::fmin(2.0 * hi, settings.q_cap);
    at_hi = coverage(hi);
  }
  if (at_hi < floor_level) {
    r.q = hi;
    r.achieved = at_hi;
    return r;
  }

  while (hi - lo > settings.resolution && r.iterations < settings.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    const double at_mid = coverage(mid);
    ++r.iterations;
    if (at_mid >= floor_level) {
      hi = mid;
      at_hi = at_mid;
    } else {
      lo = mid;
    }
  }
  r.q = hi;
  r.achieved = at_hi;
  r.converged = in_band(at_hi) && hi - lo <= settings.resolution;
  return r;
}

}  // namespace hcl
