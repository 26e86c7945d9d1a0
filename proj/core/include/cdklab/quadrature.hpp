#pragma once

#include <cstddef>
#include <functional>

#include "cdklab/jacobi.hpp"

namespace cdklab {

struct QuadResult {
  Complex value;
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;  // err_estimate at or below the requested tolerance
};

// Adaptive Gauss-Kronrod 7-15 on [lo, hi]: repeatedly bisects the panel with
// the worst |K15 - G7| estimate until the summed estimate drops below tol.
QuadResult adaptive_integrate(const std::function<Complex(double)>& f, double lo,
                              double hi, double tol, std::size_t max_panels = 4096);

// Whole-line integral of an integrand that, outside [core_lo, core_hi],
// oscillates with the given half period under an eventually monotone O(s^-2)
// envelope. The core is handled adaptively; beyond it, half-period panels are
// marched outward, where consecutive panel values alternate in sign and
// shrink, so the leftover tail is bounded by the last panel (alternating
// series). Marching stops once two consecutive panels fall below tol/16.
QuadResult oscillatory_line_integral(const std::function<Complex(double)>& f,
                                     double core_lo, double core_hi, double half_period,
                                     double tol, std::size_t max_panels = 200000);

}  // namespace cdklab
