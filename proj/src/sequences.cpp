#include "dqm/sequences.hpp"

#include <cmath>
#include <string>

#include "dqm/errors.hpp"

using namespace Eigen;

namespace dqm {

namespace {

constexpr double area_tolerance = 1e-6;
constexpr double conjugation_tolerance = 1e-10;

struct DurationVisitor {
  double operator()(const TopHatWaveform& w) const { return w.duration; }
  double operator()(const SampledWaveform& w) const { return w.duration; }
  double operator()(const InstantaneousWaveform&) const { return 0.0; }
};

struct AreaVisitor {
  double operator()(const TopHatWaveform& w) const {
    return 0.5 * w.omega * w.duration;
  }
  double operator()(const SampledWaveform& w) const {
    double area = 0.0;
    for (size_t i = 0; i + 1 < w.t.size(); ++i) {
      area += 0.25 * (w.omega[i] + w.omega[i + 1]) * (w.t[i + 1] - w.t[i]);
    }
    return area;
  }
  double operator()(const InstantaneousWaveform&) const { return 0.5 * pi; }
};

struct MaxOmegaVisitor {
  double operator()(const TopHatWaveform& w) const { return std::abs(w.omega); }
  double operator()(const SampledWaveform& w) const {
    double m = 0.0;
    for (double x : w.omega) m = std::max(m, std::abs(x));
    return m;
  }
  double operator()(const InstantaneousWaveform&) const { return 0.0; }
};

void validate_sampled(const SampledWaveform& w) {
  if (w.t.size() < 2 || w.t.size() != w.omega.size()) {
    throw ConfigError("sampled waveform needs matching t/omega arrays");
  }
  for (size_t i = 0; i + 1 < w.t.size(); ++i) {
    if (!(w.t[i + 1] > w.t[i])) {
      throw ConfigError("sampled waveform times must increase");
    }
  }
}

std::array<int, 3> block_transitions(BlockVariant variant) {
  return variant == BlockVariant::PlusMinusPlusX ? std::array<int, 3>{+1, -1, +1}
                                                 : std::array<int, 3>{-1, +1, -1};
}

double block_phase(BlockVariant variant) {
  return variant == BlockVariant::PlusMinusPlusX ? 0.0 : 0.5 * pi;
}

}  // namespace

double waveform_duration(const PulseWaveform& w) {
  return std::visit(DurationVisitor{}, w);
}

double waveform_max_omega(const PulseWaveform& w) {
  return std::visit(MaxOmegaVisitor{}, w);
}

double pulse_area(const PulseWaveform& w) { return std::visit(AreaVisitor{}, w); }

Matrix3cd pulse_propagator(const PulseSegment& segment) {
  if (const auto* s = std::get_if<SampledWaveform>(&segment.waveform)) {
    validate_sampled(*s);
    // every step shares the same generator, so the time-ordered product of
    // per-interval rotations is exact
    Matrix3cd u = Matrix3cd::Identity();
    for (size_t i = 0; i + 1 < s->t.size(); ++i) {
      const double dphi =
          0.25 * (s->omega[i] + s->omega[i + 1]) * (s->t[i + 1] - s->t[i]);
      u = pulse_unitary(segment.transition, segment.phase, dphi) * u;
    }
    return u;
  }
  return pulse_unitary(segment.transition, segment.phase,
                       pulse_area(segment.waveform));
}

double ThreePulseBlock::duration() const {
  return pulses[0].duration() + pulses[1].duration() + pulses[2].duration();
}

Matrix3cd ThreePulseBlock::propagator() const {
  return pulse_propagator(pulses[2]) * pulse_propagator(pulses[1]) *
         pulse_propagator(pulses[0]);
}

ThreePulseBlock three_pulse_block(BlockVariant variant,
                                  const std::array<PulseWaveform, 3>& waveforms) {
  ThreePulseBlock block;
  block.variant = variant;
  const auto transitions = block_transitions(variant);
  const double phase = block_phase(variant);
  for (int i = 0; i < 3; ++i) {
    const double area = pulse_area(waveforms[i]);
    if (std::abs(area - 0.5 * pi) > area_tolerance) {
      throw AreaError("pulse " + std::to_string(i) + " area " +
                      std::to_string(area) + " deviates from pi/2");
    }
    block.pulses[i] = PulseSegment{transitions[i], phase, waveforms[i]};
  }
  const Matrix3cd u = block.propagator();
  const Matrix3cd conjugated = u.adjoint() * spin1_sz() * u;
  const double defect = (conjugated + spin1_sz()).cwiseAbs().maxCoeff();
  if (defect > conjugation_tolerance) {
    throw AreaError("three-pulse block does not invert S_z (defect " +
                    std::to_string(defect) + ")");
  }
  return block;
}

ThreePulseBlock three_pulse_block(BlockVariant variant, const PulseWaveform& all) {
  return three_pulse_block(variant, std::array<PulseWaveform, 3>{all, all, all});
}

int Schedule::pulses_per_period() const {
  int count = 0;
  for (const auto& item : period_items) {
    if (std::holds_alternative<ThreePulseBlock>(item)) count += 3;
    if (std::holds_alternative<QubitFlip>(item)) count += 1;
  }
  return count;
}

Schedule build_dqm_schedule(double omega_d,
                            const std::array<PulseWaveform, 3>& x_pulses,
                            const std::array<PulseWaveform, 3>& y_pulses,
                            long long repetitions) {
  if (!(omega_d > 0.0)) throw ConfigError("omega_D must be positive");
  if (repetitions < 0) throw ConfigError("repetitions must be >= 0");
  if (repetitions % 2 != 0) {
    throw ConfigError("DQM repetitions must be even (the error-echo super-cycle "
                      "spans two elemental periods)");
  }
  const double period = two_pi / omega_d;
  double pulse_time = 0.0;
  for (const auto& w : x_pulses) pulse_time += waveform_duration(w);
  for (const auto& w : y_pulses) pulse_time += waveform_duration(w);
  if (pulse_time >= period) {
    throw GeometryError("pulse blocks exceed the sequence period");
  }
  const double gap = (period - pulse_time) / 4.0;

  // Two elemental periods per stored cycle, four blocks. S_z flips at every
  // block, so F(t) is T-periodic, but the drive runs the X variant twice
  // (phases 0, pi) then the Y variant twice (pi/2, 3pi/2): consecutive
  // phase-inverted pairs echo Rabi amplitude errors that a plain X/Y
  // alternation accumulates coherently.
  ThreePulseBlock block_x0 = three_pulse_block(BlockVariant::PlusMinusPlusX, x_pulses);
  ThreePulseBlock block_x1 = three_pulse_block(BlockVariant::PlusMinusPlusX, y_pulses);
  for (auto& p : block_x1.pulses) p.phase += pi;
  ThreePulseBlock block_y0 = three_pulse_block(BlockVariant::MinusPlusMinusY, x_pulses);
  ThreePulseBlock block_y1 = three_pulse_block(BlockVariant::MinusPlusMinusY, y_pulses);
  for (auto& p : block_y1.pulses) p.phase += pi;

  Schedule schedule;
  schedule.frame = ScheduleFrame::NvSpin1;
  schedule.period = 2.0 * period;
  schedule.repetitions = repetitions / 2;
  schedule.period_items = {
      FreeGap{gap},       block_x0, FreeGap{2.0 * gap}, block_x1,
      FreeGap{2.0 * gap}, block_y0, FreeGap{2.0 * gap}, block_y1,
      FreeGap{gap},
  };
  return schedule;
}

Schedule build_dqm_schedule_instantaneous(double omega_d, long long repetitions) {
  const std::array<PulseWaveform, 3> ideal = {
      InstantaneousWaveform{}, InstantaneousWaveform{}, InstantaneousWaveform{}};
  return build_dqm_schedule(omega_d, ideal, ideal, repetitions);
}

Schedule build_dqm_schedule_tophat(double omega_d, double t_pi,
                                   long long repetitions) {
  if (!(t_pi > 0.0)) throw ConfigError("top-hat t_pi must be positive");
  const PulseWaveform w = TopHatWaveform{pi / t_pi, t_pi};
  const std::array<PulseWaveform, 3> pulses = {w, w, w};
  return build_dqm_schedule(omega_d, pulses, pulses, repetitions);
}

Schedule build_dqm_schedule_modulated(const RabiWaveform& waveform, double omega_d,
                                      long long repetitions) {
  if (waveform.pulses.size() != 6) {
    throw ConfigError("modulated schedule needs the six synthesized pulses");
  }
  auto sampled = [&](int i) -> PulseWaveform {
    const SampledPulse& p = waveform.pulses[i];
    SampledWaveform w;
    w.duration = p.duration;
    w.omega = p.omega;
    w.t.resize(p.t.size());
    for (size_t j = 0; j < p.t.size(); ++j) w.t[j] = p.t[j] - p.t_start;
    return w;
  };
  return build_dqm_schedule(omega_d, {sampled(0), sampled(1), sampled(2)},
                            {sampled(3), sampled(4), sampled(5)}, repetitions);
}

Schedule build_sqm_schedule(double omega_d, long long repetitions) {
  if (!(omega_d > 0.0)) throw ConfigError("omega_D must be positive");
  if (repetitions < 0) throw ConfigError("repetitions must be >= 0");
  const double tau = pi / omega_d;  // T/2: flips where the DQM blocks sit
  const double unit = 8.0 * tau;
  // XYXYYXYX phase pattern
  const double x = 0.0;
  const double y = 0.5 * pi;
  const double phases[8] = {x, y, x, y, y, x, y, x};

  Schedule schedule;
  schedule.frame = ScheduleFrame::SqmQubit;
  schedule.period = unit;
  schedule.repetitions = repetitions;
  schedule.period_items.push_back(FreeGap{0.5 * tau});
  for (int i = 0; i < 8; ++i) {
    schedule.period_items.push_back(QubitFlip{phases[i]});
    schedule.period_items.push_back(FreeGap{i == 7 ? 0.5 * tau : tau});
  }
  return schedule;
}

}  // namespace dqm
