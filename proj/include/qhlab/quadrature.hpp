#pragma once

#include <functional>

namespace qhlab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Simpson with Richardson correction. Stops a panel when the
/// two-level difference is below max(abs_tol, rel_tol * |panel estimate|).
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                  double abs_tol = 0.0, int max_depth = 48);

/// Composite Simpson on 2, 4, 8, ... panels until the relative change between
/// successive refinements drops below rel_tol.
QuadratureResult composite_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                   int max_panels = 1 << 20);

}  // namespace qhlab
