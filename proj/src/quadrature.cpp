#include "dqm/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace dqm {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double fa, double fm, double fb, double whole, double tol,
                int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int initial_panels) {
  if (a == b) return 0.0;
  const int panels = std::max(1, initial_panels);
  const double h = (b - a) / panels;
  // floor the per-panel tolerance at the roundoff level so the recursion
  // terminates even when the requested tolerance is unreachable
  const double panel_tol = std::max(abs_tol / panels, 1e-16);
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h;
    const double x1 = (i + 1 == panels) ? b : x0 + h;
    const double xm = 0.5 * (x0 + x1);
    const double f0 = f(x0);
    const double fm = f(xm);
    const double f1 = f(x1);
    const double whole = simpson(f0, fm, f1, x1 - x0);
    total += adaptive(f, x0, x1, f0, fm, f1, whole, panel_tol, 24);
  }
  return total;
}

}  // namespace dqm
