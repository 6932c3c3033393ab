#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dqm/spin_system.hpp"

namespace dqm {

// ---------------------------------------------------------------------------
// Modulation function F(t): the coefficient of S_z under the two three-pulse
// blocks per period. Pulse kinds follow the conjugation tables for the
// [+1,-1,+1] block (Pulse1..3) and the sign-mirrored [-1,+1,-1] block.
// ---------------------------------------------------------------------------

enum class SegmentKind {
  FreePlus,      // F = +1
  FreeMinus,     // F = -1
  Pulse1,        // F = (cos^2 phi + 1)/2
  Pulse2,        // F = (cos^2 phi - sin^2 phi)/2
  Pulse3,        // F = -(1 + sin^2 phi)/2
  Pulse1Mirror,  // F = -(cos^2 phi + 1)/2
  Pulse2Mirror,  // F = -(cos^2 phi - sin^2 phi)/2
  Pulse3Mirror,  // F = +(1 + sin^2 phi)/2
};

bool is_pulse_kind(SegmentKind kind);

// S_z coefficient at pulse phase phi (free kinds ignore phi)
double conjugation_f(SegmentKind kind, double phi);

// invertible F range of a pulse kind, as (lo, hi)
std::pair<double, double> invertible_range(SegmentKind kind);

// inverse of conjugation_f onto the principal branch phi in [0, pi/2]
double phase_from_f(SegmentKind kind, double f);

// oscillating Gaussian correction added to the bare pulse shape:
//   F(t) = F_bare(t) + alpha * cos(2 pi k t / T) * exp(-(t - t_mid)^2 / (2 sigma^2))
struct GaussianCosineCorrection {
  double alpha = 0.0;
  int harmonic = 0;    // k
  double sigma = 0.0;  // seconds
  double t_mid = 0.0;  // seconds
};

struct ModulationSegment {
  SegmentKind kind = SegmentKind::FreePlus;
  double t_start = 0.0;
  double t_end = 0.0;
  std::optional<GaussianCosineCorrection> correction;

  double duration() const { return t_end - t_start; }
  bool is_pulse() const { return is_pulse_kind(kind); }
};

class ModulationFunction {
 public:
  std::vector<ModulationSegment> segments;
  double period = 0.0;
  double t_pi = 0.0;

  double value(double t) const;
  double bare_value(double t) const;
  int segment_index_at(double t) const;
  std::vector<int> pulse_segment_indices() const;
};

// nine-segment top-hat construction; t_pi = r * T / l, gaps (t1-0) =
// (t5-t4)/2 = (T-t8) per the standard DD symmetry
ModulationFunction tophat_modulation(int l, double r, double period);

// f_l = 2/T  int_0^T F(s) cos(l w_D s) ds by per-segment quadrature
double fourier_coefficient(const ModulationFunction& f, int l);

// closed form for top-hat pulses; removable singularity at r = 1/2
double fl_tophat_analytic(int l, double r);

// t_pi = (n/3)(T/l); rejects widths whose six pulses do not fit the period
double optimal_pulse_width(int l, double period, int n);

struct SynthesisParams {
  int harmonic_l = 43;
  int pulse_thirds = 21;        // n: pulse width in thirds of Larmor periods
  int correction_harmonic = 0;  // k; 0 selects k = l
  double sigma_frac = 1.0 / 6.0;
  double omega_larmor = 0.0;
};

// corrected modulation whose pulse-segment filter integrals vanish, restoring
// |f_l| = 4/(pi l)
ModulationFunction synthesize_corrected_modulation(const SynthesisParams& params);

// ---------------------------------------------------------------------------
// Inversion of F(t) to the physical drive waveform
// ---------------------------------------------------------------------------

struct SampledPulse {
  int transition = +1;
  double base_phase = 0.0;  // 0 for the X block, pi/2 for the Y block
  double t_start = 0.0;
  double duration = 0.0;
  std::vector<double> t;      // absolute sample times
  std::vector<double> omega;  // signed Rabi frequency, rad/s
};

struct RabiWaveform {
  double period = 0.0;
  double t_pi = 0.0;
  std::vector<SampledPulse> pulses;

  double max_abs_omega() const;
};

// recover Omega(t) = 2 dphi/dt per pulse segment; centered differences with
// one-sided edge stencils, each pulse normalized to accumulated phase pi/2
RabiWaveform invert_to_rabi(const ModulationFunction& f, double sample_rate);

}  // namespace dqm
