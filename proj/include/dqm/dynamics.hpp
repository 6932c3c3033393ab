#pragma once

#include <functional>
#include <vector>

#include "dqm/operators.hpp"
#include "dqm/sequences.hpp"

namespace dqm {

// multiplicative Rabi amplitude error and a common energy shift on the
// driven NV levels
struct ErrorModel {
  double rabi_error = 0.0;  // fractional, |e| < 1
  double detuning = 0.0;    // rad/s

  void validate() const;
};

struct StepControl {
  // max integration step as a fraction of min(Larmor period, pi/Omega_max)
  double step_fraction = 1.0 / 40.0;
};

struct PropagationOptions {
  ErrorModel errors;
  StepControl step;
  bool sqm_include_gradient = true;
  // when set, the final signal is recomputed at half the step and a
  // deviation above 1e-4 raises SolverError
  bool convergence_guard = false;
};

struct SimulationState {
  Eigen::VectorXcd state;
  double time = 0.0;
};

// propagator of one schedule period (pulses integrated piecewise, gaps exact)
OperatorMatrix period_propagator(const SpinSystem& system, const Schedule& schedule,
                                 const PropagationOptions& options);

// full propagator after all repetitions
OperatorMatrix schedule_propagator(const SpinSystem& system, const Schedule& schedule,
                                   const PropagationOptions& options);

SimulationState propagate(const SpinSystem& system, const Schedule& schedule,
                          const PropagationOptions& options,
                          const SimulationState& initial);

// real part of <state|obs|state>; the imaginary residue must be < 1e-10
double expectation(const Eigen::VectorXcd& state, const OperatorMatrix& obs);

// sensor coherence signal averaged over the 2^N nuclear basis states
// (NV in (|1>+|-1>)/sqrt(2) reading sigma~_x, or the SQM qubit analogue)
double ensemble_signal(const SpinSystem& system, const Schedule& schedule,
                       const PropagationOptions& options);

struct SpectrumScan {
  std::vector<double> omega_d;  // rad/s
  std::vector<double> signal;   // <sigma~_x> per point
};

using ScheduleFactory = std::function<Schedule(double omega_d)>;

// one independent propagation per drive frequency; deterministic for any
// worker count
SpectrumScan scan_spectrum(const SpinSystem& system, const ScheduleFactory& factory,
                           const std::vector<double>& omega_d_values,
                           const PropagationOptions& options, int workers = 0);

// SQM comparison scan (instantaneous XY8 flips on the qubit subspace)
SpectrumScan run_sqm(const SpinSystem& system, long long repetitions,
                     const std::vector<double>& omega_d_values,
                     const PropagationOptions& options, int workers = 0);

// worker-count resolution: explicit argument, else DQMAG_WORKERS, else
// hardware concurrency
int resolve_worker_count(int requested);

}  // namespace dqm
