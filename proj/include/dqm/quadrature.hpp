#pragma once

#include <functional>

namespace dqm {

// Adaptive Simpson integration of f over [a, b] to absolute tolerance.
// initial_panels forces a uniform pre-split so oscillatory integrands are
// resolved before the error estimate is trusted.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int initial_panels = 16);

}  // namespace dqm
