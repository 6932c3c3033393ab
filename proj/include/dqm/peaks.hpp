#pragma once

#include <vector>

namespace dqm {

// a dip of the coherence signal (a spectral peak of 1 - signal)
struct SignalDip {
  double omega_d = 0.0;     // parabola-refined position, rad/s
  double signal = 0.0;      // refined signal value at the dip
  double prominence = 0.0;  // in signal units
  int index = 0;            // grid index of the discrete minimum
};

// local minima of `signal` with prominence >= threshold, positions refined
// by a three-point parabola; the grid must be strictly increasing
std::vector<SignalDip> find_signal_dips(const std::vector<double>& omega_d,
                                        const std::vector<double>& signal,
                                        double prominence_threshold);

}  // namespace dqm
