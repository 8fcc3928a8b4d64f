#pragma once

#include <functional>

namespace stefan {

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Bisects until the Kronrod-Gauss difference on each panel is below
/// max(abs_tol, rel_tol * |panel estimate|) or the depth limit is hit.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 40);

}  // namespace stefan
