#pragma once

#include <array>
#include <variant>
#include <vector>

#include "dqm/modulation.hpp"
#include "dqm/operators.hpp"

namespace dqm {

// ---------------------------------------------------------------------------
// Pulse waveforms
// ---------------------------------------------------------------------------

struct TopHatWaveform {
  double omega = 0.0;     // constant Rabi frequency, rad/s
  double duration = 0.0;  // seconds
};

struct SampledWaveform {
  std::vector<double> t;      // sample times relative to pulse start
  std::vector<double> omega;  // signed Rabi frequency per sample
  double duration = 0.0;
};

// ideal zero-duration pi pulse
struct InstantaneousWaveform {};

using PulseWaveform =
    std::variant<TopHatWaveform, SampledWaveform, InstantaneousWaveform>;

double waveform_duration(const PulseWaveform& w);
double waveform_max_omega(const PulseWaveform& w);

// accumulated phase phi_f = int Omega/2 dt (pi/2 for every pi pulse here)
double pulse_area(const PulseWaveform& w);

struct PulseSegment {
  int transition = +1;
  double phase = 0.0;
  PulseWaveform waveform;

  double duration() const { return waveform_duration(waveform); }
};

// NV-only propagator of one pulse (nuclear evolution during the pulse is
// handled by dynamics; this is the bare Eq.-(3) rotation)
Eigen::Matrix3cd pulse_propagator(const PulseSegment& segment);

// ---------------------------------------------------------------------------
// Three-pulse blocks and schedules
// ---------------------------------------------------------------------------

enum class BlockVariant {
  PlusMinusPlusX,   // transitions (+1, -1, +1), phase 0
  MinusPlusMinusY,  // transitions (-1, +1, -1), phase pi/2
};

struct ThreePulseBlock {
  BlockVariant variant = BlockVariant::PlusMinusPlusX;
  std::array<PulseSegment, 3> pulses;

  double duration() const;
  Eigen::Matrix3cd propagator() const;  // time-ordered product
};

// validates pulse areas (pi/2 each to 1e-6) and the S_z -> -S_z conjugation
ThreePulseBlock three_pulse_block(BlockVariant variant,
                                  const std::array<PulseWaveform, 3>& waveforms);
ThreePulseBlock three_pulse_block(BlockVariant variant, const PulseWaveform& all);

struct FreeGap {
  double duration = 0.0;
};

// instantaneous sigma_z flip on the SQM qubit, phase 0 = X, pi/2 = Y
struct QubitFlip {
  double phase = 0.0;
};

using ScheduleItem = std::variant<FreeGap, ThreePulseBlock, QubitFlip>;

enum class ScheduleFrame { NvSpin1, SqmQubit };

struct Schedule {
  ScheduleFrame frame = ScheduleFrame::NvSpin1;
  std::vector<ScheduleItem> period_items;
  double period = 0.0;
  long long repetitions = 0;

  int pulses_per_period() const;
  double total_time() const { return period * static_cast<double>(repetitions); }
};

// one period: gap g | X block | gap 2g | Y block | gap g, g = (T - 6 t_pi)/4
Schedule build_dqm_schedule(double omega_d,
                            const std::array<PulseWaveform, 3>& x_pulses,
                            const std::array<PulseWaveform, 3>& y_pulses,
                            long long repetitions);
Schedule build_dqm_schedule_instantaneous(double omega_d, long long repetitions);
Schedule build_dqm_schedule_tophat(double omega_d, double t_pi,
                                   long long repetitions);
// gaps rescale with omega_d, the synthesized pulse shapes stay fixed
Schedule build_dqm_schedule_modulated(const RabiWaveform& waveform, double omega_d,
                                      long long repetitions);

// XY8 unit of duration 8 tau with tau = T/2, flips at odd multiples of
// tau/2 ordered XYXYYXYX; repeated `repetitions` times
Schedule build_sqm_schedule(double omega_d, long long repetitions);

}  // namespace dqm
