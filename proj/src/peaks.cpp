#include "dqm/peaks.hpp"

#include <algorithm>
#include <cmath>

#include "dqm/errors.hpp"

namespace dqm {

std::vector<SignalDip> find_signal_dips(const std::vector<double>& omega_d,
                                        const std::vector<double>& signal,
                                        double prominence_threshold) {
  const size_t n = signal.size();
  if (omega_d.size() != n) throw ConfigError("scan arrays differ in length");
  std::vector<SignalDip> dips;
  if (n < 3) return dips;

  for (size_t i = 1; i + 1 < n; ++i) {
    // plateau-tolerant local minimum
    if (signal[i] > signal[i - 1] || signal[i] > signal[i + 1]) continue;
    if (signal[i] == signal[i - 1] && signal[i] == signal[i + 1]) continue;

    // prominence: lowest barrier separating this dip from a deeper one
    double left_barrier = signal[i];
    for (size_t j = i; j-- > 0;) {
      if (signal[j] < signal[i]) break;
      left_barrier = std::max(left_barrier, signal[j]);
    }
    double right_barrier = signal[i];
    for (size_t j = i + 1; j < n; ++j) {
      if (signal[j] < signal[i]) break;
      right_barrier = std::max(right_barrier, signal[j]);
    }
    const double prominence = std::min(left_barrier, right_barrier) - signal[i];
    if (prominence < prominence_threshold) continue;

    SignalDip dip;
    dip.index = static_cast<int>(i);
    dip.prominence = prominence;
    const double a = signal[i - 1];
    const double b = signal[i];
    const double c = signal[i + 1];
    const double denom = a - 2.0 * b + c;
    if (denom > 0.0) {
      const double shift = 0.5 * (a - c) / denom;  // in grid units
      const double h = 0.5 * (omega_d[i + 1] - omega_d[i - 1]);
      dip.omega_d = omega_d[i] + shift * h;
      dip.signal = b - 0.25 * (a - c) * shift;
    } else {
      dip.omega_d = omega_d[i];
      dip.signal = b;
    }
    dips.push_back(dip);
  }
  return dips;
}

}  // namespace dqm
