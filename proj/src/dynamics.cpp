#include "dqm/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

#include "dqm/errors.hpp"

using namespace Eigen;

namespace dqm {

namespace {

constexpr std::complex<double> im{0.0, 1.0};

void check_frame_dimensions(const SpinSystem& system, const Schedule& schedule,
                            Index dim) {
  const Index expected =
      schedule.frame == ScheduleFrame::NvSpin1 ? system.dim() : system.sqm_dim();
  if (dim != expected) {
    throw SolverError("state dimension " + std::to_string(dim) +
                      " does not match schedule frame dimension " +
                      std::to_string(expected));
  }
}

// 2x2 rotation exp(-i theta (cos(phase) sx + sin(phase) sy))
Matrix2cd qubit_rotation(double phase, double theta) {
  Matrix2cd axis;
  axis << 0.0, std::exp(-im * phase), std::exp(im * phase), 0.0;
  return std::cos(theta) * Matrix2cd::Identity() - im * std::sin(theta) * axis;
}

// static Hamiltonian with eigendecomposition reused for every gap
struct StaticHamiltonian {
  OperatorMatrix matrix;
  SelfAdjointEigenSolver<OperatorMatrix> eig;

  explicit StaticHamiltonian(OperatorMatrix h) : matrix(std::move(h)), eig(matrix) {
    if (eig.info() != Success) throw SolverError("eigendecomposition failed");
  }

  OperatorMatrix evolve(double t) const {
    VectorXcd phases(eig.eigenvalues().size());
    for (Index i = 0; i < phases.size(); ++i) {
      phases(i) = std::exp(-im * eig.eigenvalues()(i) * t);
    }
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  }
};

double schedule_max_omega(const Schedule& schedule) {
  double m = 0.0;
  for (const auto& item : schedule.period_items) {
    if (const auto* block = std::get_if<ThreePulseBlock>(&item)) {
      for (const auto& p : block->pulses) {
        m = std::max(m, waveform_max_omega(p.waveform));
      }
    }
  }
  return m;
}

struct PeriodBuilder {
  const SpinSystem& system;
  const Schedule& schedule;
  const PropagationOptions& options;
  StaticHamiltonian static_h;
  double max_step;
  int n_nuclei;

  PeriodBuilder(const SpinSystem& sys, const Schedule& sched,
                const PropagationOptions& opt)
      : system(sys),
        schedule(sched),
        options(opt),
        static_h(build_static(sys, sched, opt)),
        n_nuclei(sys.nucleus_count()) {
    double shortest = sys.larmor_period();
    const double omega_max = schedule_max_omega(sched);
    if (omega_max > 0.0) shortest = std::min(shortest, pi / omega_max);
    max_step = opt.step.step_fraction * shortest;
    if (!(max_step > 0.0)) throw SolverError("step control produced a zero step");
  }

  static OperatorMatrix build_static(const SpinSystem& sys, const Schedule& sched,
                                     const PropagationOptions& opt) {
    if (sched.frame == ScheduleFrame::NvSpin1) {
      OperatorMatrix h = free_hamiltonian(sys);
      if (opt.errors.detuning != 0.0) {
        h += opt.errors.detuning * nv_detuning_operator(sys);
      }
      return h;
    }
    OperatorMatrix h = sqm_effective_hamiltonian(sys, opt.sqm_include_gradient);
    if (opt.errors.detuning != 0.0) {
      h += opt.errors.detuning * sqm_detuning_operator(sys);
    }
    return h;
  }

  OperatorMatrix tophat_propagator(const PulseSegment& seg,
                                   const TopHatWaveform& w) const {
    const double omega = (1.0 + options.errors.rabi_error) * w.omega;
    const OperatorMatrix h =
        static_h.matrix + 0.5 * omega * embed_nv(drive_coupling(seg.transition,
                                                                seg.phase),
                                                 n_nuclei);
    return expm_hermitian(h, w.duration);
  }

  OperatorMatrix sampled_propagator(const PulseSegment& seg,
                                    const SampledWaveform& w) const {
    const OperatorMatrix coupling =
        embed_nv(drive_coupling(seg.transition, seg.phase), n_nuclei);
    OperatorMatrix u =
        OperatorMatrix::Identity(static_h.matrix.rows(), static_h.matrix.cols());
    const double scale = 1.0 + options.errors.rabi_error;
    for (size_t i = 0; i + 1 < w.t.size(); ++i) {
      const double dt = w.t[i + 1] - w.t[i];
      const int substeps = std::max(1, static_cast<int>(std::ceil(dt / max_step)));
      const double h_step = dt / substeps;
      for (int s = 0; s < substeps; ++s) {
        // midpoint sample of the linearly interpolated waveform
        const double frac = (s + 0.5) / substeps;
        const double omega =
            scale * ((1.0 - frac) * w.omega[i] + frac * w.omega[i + 1]);
        const OperatorMatrix h = static_h.matrix + 0.5 * omega * coupling;
        u = (expm_hermitian(h, h_step) * u).eval();
      }
    }
    return u;
  }

  OperatorMatrix block_propagator(const ThreePulseBlock& block) const {
    OperatorMatrix u =
        OperatorMatrix::Identity(static_h.matrix.rows(), static_h.matrix.cols());
    for (const auto& pulse : block.pulses) {
      if (std::holds_alternative<InstantaneousWaveform>(pulse.waveform)) {
        const double phi = 0.5 * pi * (1.0 + options.errors.rabi_error);
        u = (embed_nv(pulse_unitary(pulse.transition, pulse.phase, phi), n_nuclei) *
             u)
                .eval();
      } else if (const auto* th = std::get_if<TopHatWaveform>(&pulse.waveform)) {
        u = (tophat_propagator(pulse, *th) * u).eval();
      } else {
        u = (sampled_propagator(pulse, std::get<SampledWaveform>(pulse.waveform)) *
             u)
                .eval();
      }
    }
    return u;
  }

  OperatorMatrix period() const {
    OperatorMatrix u =
        OperatorMatrix::Identity(static_h.matrix.rows(), static_h.matrix.cols());
    for (const auto& item : schedule.period_items) {
      if (const auto* gap = std::get_if<FreeGap>(&item)) {
        if (gap->duration > 0.0) u = (static_h.evolve(gap->duration) * u).eval();
      } else if (const auto* block = std::get_if<ThreePulseBlock>(&item)) {
        u = (block_propagator(*block) * u).eval();
      } else {
        const auto& flip = std::get<QubitFlip>(item);
        const double theta = 0.5 * pi * (1.0 + options.errors.rabi_error);
        u = (sqm_qubit_operator(qubit_rotation(flip.phase, theta), n_nuclei) * u)
                .eval();
      }
    }
    return u;
  }
};

double ensemble_signal_once(const SpinSystem& system, const Schedule& schedule,
                            const PropagationOptions& options) {
  const OperatorMatrix u = schedule_propagator(system, schedule, options);
  const int n = system.nucleus_count();
  const int nuclear_dim = 1 << n;

  VectorXcd sensor;
  OperatorMatrix observable;
  int sensor_dim;
  if (schedule.frame == ScheduleFrame::NvSpin1) {
    sensor_dim = 3;
    sensor = VectorXcd::Zero(3);
    sensor(0) = sensor(2) = 1.0 / std::sqrt(2.0);  // (|1> + |-1>)/sqrt(2)
    observable = embed_nv(sigma_tilde_x(), n);
  } else {
    sensor_dim = 2;
    sensor = VectorXcd::Zero(2);
    sensor(0) = sensor(1) = 1.0 / std::sqrt(2.0);  // (|1> + |0>)/sqrt(2)
    Matrix2cd sx;
    sx << 0, 1, 1, 0;
    observable = sqm_qubit_operator(sx, n);
  }

  double total = 0.0;
  VectorXcd psi(sensor_dim * nuclear_dim);
  for (int b = 0; b < nuclear_dim; ++b) {
    psi.setZero();
    for (int s = 0; s < sensor_dim; ++s) psi(s * nuclear_dim + b) = sensor(s);
    const VectorXcd evolved = u * psi;
    const double norm_drift = std::abs(evolved.squaredNorm() - 1.0);
    if (norm_drift > 1e-9) {
      throw SolverError("propagation lost norm by " + std::to_string(norm_drift));
    }
    total += expectation(evolved, observable);
  }
  return total / nuclear_dim;
}

}  // namespace

void ErrorModel::validate() const {
  if (!(std::abs(rabi_error) < 1.0)) {
    throw ConfigError("fractional Rabi error must satisfy |e| < 1");
  }
  if (!std::isfinite(detuning)) throw ConfigError("detuning must be finite");
}

OperatorMatrix period_propagator(const SpinSystem& system, const Schedule& schedule,
                                 const PropagationOptions& options) {
  options.errors.validate();
  OperatorMatrix u = PeriodBuilder(system, schedule, options).period();
  // long products of step exponentials drift off the unitary manifold at the
  // 1e-12 level; one Newton-Schulz sweep restores it before the matrix power
  // amplifies the drift across thousands of repetitions
  const OperatorMatrix id = OperatorMatrix::Identity(u.rows(), u.cols());
  for (int i = 0; i < 2; ++i) {
    u = (0.5 * u * (3.0 * id - u.adjoint() * u)).eval();
  }
  return u;
}

OperatorMatrix schedule_propagator(const SpinSystem& system, const Schedule& schedule,
                                   const PropagationOptions& options) {
  const OperatorMatrix u = period_propagator(system, schedule, options);
  return matrix_power(u, schedule.repetitions);
}

SimulationState propagate(const SpinSystem& system, const Schedule& schedule,
                          const PropagationOptions& options,
                          const SimulationState& initial) {
  check_frame_dimensions(system, schedule, initial.state.size());
  SimulationState out;
  out.state = schedule_propagator(system, schedule, options) * initial.state;
  out.time = initial.time + schedule.total_time();
  return out;
}

double expectation(const VectorXcd& state, const OperatorMatrix& obs) {
  if (state.size() != obs.rows() || obs.rows() != obs.cols()) {
    throw SolverError("state/observable dimension mismatch");
  }
  const std::complex<double> value = state.adjoint() * obs * state;
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw SolverError("expectation of Hermitian observable has imaginary residue " +
                      std::to_string(value.imag()));
  }
  return value.real();
}

double ensemble_signal(const SpinSystem& system, const Schedule& schedule,
                       const PropagationOptions& options) {
  const double signal = ensemble_signal_once(system, schedule, options);
  if (options.convergence_guard) {
    PropagationOptions fine = options;
    fine.convergence_guard = false;
    fine.step.step_fraction = 0.5 * options.step.step_fraction;
    const double refined = ensemble_signal_once(system, schedule, fine);
    if (std::abs(refined - signal) > 1e-4) {
      throw SolverError("step too coarse: halving changed the signal by " +
                        std::to_string(std::abs(refined - signal)));
    }
  }
  return signal;
}

SpectrumScan scan_spectrum(const SpinSystem& system, const ScheduleFactory& factory,
                           const std::vector<double>& omega_d_values,
                           const PropagationOptions& options, int workers) {
  SpectrumScan scan;
  scan.omega_d = omega_d_values;
  scan.signal.assign(omega_d_values.size(), 0.0);

  const int thread_count =
      std::min<int>(resolve_worker_count(workers),
                    std::max<size_t>(omega_d_values.size(), 1));
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto work = [&]() {
    while (!failed.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= omega_d_values.size()) break;
      try {
        const Schedule schedule = factory(omega_d_values[i]);
        scan.signal[i] = ensemble_signal(system, schedule, options);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_message.empty()) error_message = e.what();
      }
    }
  };

  if (thread_count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw SolverError("scan failed: " + error_message);
  return scan;
}

SpectrumScan run_sqm(const SpinSystem& system, long long repetitions,
                     const std::vector<double>& omega_d_values,
                     const PropagationOptions& options, int workers) {
  return scan_spectrum(
      system,
      [repetitions](double omega_d) { return build_sqm_schedule(omega_d, repetitions); },
      omega_d_values, options, workers);
}

int resolve_worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DQMAG_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace dqm
