#include "dqm/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dqm/errors.hpp"
#include "dqm/quadrature.hpp"

namespace dqm {

namespace {

constexpr double range_tolerance = 1e-9;  // allowed F excursion past a segment range

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// linear pulse phase for the top-hat construction
double linear_phase(const ModulationSegment& seg, double t) {
  return 0.5 * pi * (t - seg.t_start) / seg.duration();
}

double correction_value(const GaussianCosineCorrection& c, double t, double period) {
  const double arg = (t - c.t_mid) / c.sigma;
  return c.alpha * std::cos(two_pi * c.harmonic * t / period) *
         std::exp(-0.5 * arg * arg);
}

// segment layout shared by the top-hat and corrected constructions
std::vector<ModulationSegment> nine_segment_layout(double period, double t_pi) {
  const double gap = (period - 6.0 * t_pi) / 4.0;
  std::vector<ModulationSegment> segs;
  double t = 0.0;
  auto push = [&](SegmentKind kind, double duration) {
    segs.push_back({kind, t, t + duration, std::nullopt});
    t += duration;
  };
  push(SegmentKind::FreePlus, gap);
  push(SegmentKind::Pulse1, t_pi);
  push(SegmentKind::Pulse2, t_pi);
  push(SegmentKind::Pulse3, t_pi);
  push(SegmentKind::FreeMinus, 2.0 * gap);
  push(SegmentKind::Pulse1Mirror, t_pi);
  push(SegmentKind::Pulse2Mirror, t_pi);
  push(SegmentKind::Pulse3Mirror, t_pi);
  push(SegmentKind::FreePlus, gap);
  segs.back().t_end = period;  // absorb roundoff
  return segs;
}

}  // namespace

bool is_pulse_kind(SegmentKind kind) {
  return kind != SegmentKind::FreePlus && kind != SegmentKind::FreeMinus;
}

double conjugation_f(SegmentKind kind, double phi) {
  const double c2 = std::cos(phi) * std::cos(phi);
  const double s2 = std::sin(phi) * std::sin(phi);
  switch (kind) {
    case SegmentKind::FreePlus: return 1.0;
    case SegmentKind::FreeMinus: return -1.0;
    case SegmentKind::Pulse1: return 0.5 * (c2 + 1.0);
    case SegmentKind::Pulse2: return 0.5 * (c2 - s2);
    case SegmentKind::Pulse3: return -0.5 * (1.0 + s2);
    case SegmentKind::Pulse1Mirror: return -0.5 * (c2 + 1.0);
    case SegmentKind::Pulse2Mirror: return -0.5 * (c2 - s2);
    case SegmentKind::Pulse3Mirror: return 0.5 * (1.0 + s2);
  }
  throw ConfigError("unknown segment kind");
}

std::pair<double, double> invertible_range(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::Pulse1: return {0.5, 1.0};
    case SegmentKind::Pulse2: return {-0.5, 0.5};
    case SegmentKind::Pulse3: return {-1.0, -0.5};
    case SegmentKind::Pulse1Mirror: return {-1.0, -0.5};
    case SegmentKind::Pulse2Mirror: return {-0.5, 0.5};
    case SegmentKind::Pulse3Mirror: return {0.5, 1.0};
    default: throw ConfigError("free segments have no invertible range");
  }
}

double phase_from_f(SegmentKind kind, double f) {
  switch (kind) {
    case SegmentKind::Pulse1: return std::acos(std::sqrt(clamp01(2.0 * f - 1.0)));
    case SegmentKind::Pulse2: return 0.5 * std::acos(std::clamp(2.0 * f, -1.0, 1.0));
    case SegmentKind::Pulse3: return std::asin(std::sqrt(clamp01(-2.0 * f - 1.0)));
    case SegmentKind::Pulse1Mirror:
      return std::acos(std::sqrt(clamp01(-2.0 * f - 1.0)));
    case SegmentKind::Pulse2Mirror:
      return 0.5 * std::acos(std::clamp(-2.0 * f, -1.0, 1.0));
    case SegmentKind::Pulse3Mirror:
      return std::asin(std::sqrt(clamp01(2.0 * f - 1.0)));
    default: throw ConfigError("free segments have no pulse phase");
  }
}

double ModulationFunction::bare_value(double t) const {
  const ModulationSegment& seg = segments[segment_index_at(t)];
  if (!seg.is_pulse()) return conjugation_f(seg.kind, 0.0);
  return conjugation_f(seg.kind, linear_phase(seg, t));
}

double ModulationFunction::value(double t) const {
  const ModulationSegment& seg = segments[segment_index_at(t)];
  if (!seg.is_pulse()) return conjugation_f(seg.kind, 0.0);
  double f = conjugation_f(seg.kind, linear_phase(seg, t));
  if (seg.correction) f += correction_value(*seg.correction, t, period);
  return f;
}

int ModulationFunction::segment_index_at(double t) const {
  if (t < 0.0 || t > period) throw ConfigError("time outside modulation period");
  for (size_t i = 0; i + 1 < segments.size(); ++i) {
    if (t < segments[i].t_end) return static_cast<int>(i);
  }
  return static_cast<int>(segments.size()) - 1;
}

std::vector<int> ModulationFunction::pulse_segment_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].is_pulse()) out.push_back(static_cast<int>(i));
  }
  return out;
}

ModulationFunction tophat_modulation(int l, double r, double period) {
  if (l < 1) throw ConfigError("harmonic l must be >= 1");
  if (!(r > 0.0)) throw ConfigError("pulse width ratio r must be positive");
  if (!(period > 0.0)) throw ConfigError("period must be positive");
  const double t_pi = r * period / l;
  if (6.0 * t_pi >= period) {
    throw GeometryError("top-hat pulses overlap the free segments (6 t_pi >= T)");
  }
  ModulationFunction f;
  f.period = period;
  f.t_pi = t_pi;
  f.segments = nine_segment_layout(period, t_pi);
  return f;
}

double fourier_coefficient(const ModulationFunction& f, int l) {
  if (l < 1) throw ConfigError("harmonic l must be >= 1");
  // scaled time u = t/T keeps segment integrals O(1)
  double total = 0.0;
  for (const auto& seg : f.segments) {
    const double u0 = seg.t_start / f.period;
    const double u1 = seg.t_end / f.period;
    const int cycles = static_cast<int>(std::ceil(l * (u1 - u0)));
    auto integrand = [&](double u) {
      return f.value(u * f.period) * std::cos(two_pi * l * u);
    };
    total += integrate(integrand, u0, u1, 1e-14, 8 + 4 * cycles);
  }
  return 2.0 * total;
}

double fl_tophat_analytic(int l, double r) {
  if (l < 1 || l % 2 == 0) throw ConfigError("closed form requires odd l >= 1");
  if (r < 0.0) throw ConfigError("pulse width ratio r must be non-negative");
  // written in u = r - 1/2 so the r = 1/2 zero of the denominator cancels
  const double u = r - 0.5;
  const double sign = (((l + 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  if (std::abs(u) < 1e-12) return 0.0;
  const double s = std::sin(pi * u);
  return sign * (-(s * s * s)) / (pi * l * u * (u + 1.0));
}

double optimal_pulse_width(int l, double period, int n) {
  if (n < 1) throw ConfigError("pulse width parameter n must be >= 1");
  if (l < 1) throw ConfigError("harmonic l must be >= 1");
  const double t_pi = (n / 3.0) * (period / l);
  if (6.0 * t_pi >= period) {
    throw GeometryError("pulse blocks overlap: n = " + std::to_string(n) +
                        " needs 6 t_pi < T, i.e. n < l/2 = " +
                        std::to_string(0.5 * l));
  }
  return t_pi;
}

namespace {

// scaled filter integral 2 * int_seg F(uT) cos(2 pi l u) du of one segment
double segment_filter_integral(const ModulationFunction& f,
                               const ModulationSegment& seg, int l) {
  const double u0 = seg.t_start / f.period;
  const double u1 = seg.t_end / f.period;
  const int cycles = static_cast<int>(std::ceil(l * (u1 - u0)));
  auto integrand = [&](double u) {
    return f.value(u * f.period) * std::cos(two_pi * l * u);
  };
  return 2.0 * integrate(integrand, u0, u1, 1e-14, 8 + 4 * cycles);
}

void check_segment_range(const ModulationFunction& f, int seg_index) {
  const ModulationSegment& seg = f.segments[seg_index];
  const auto [lo, hi] = invertible_range(seg.kind);
  const int samples = 10000;
  for (int i = 0; i <= samples; ++i) {
    const double t = seg.t_start + seg.duration() * i / samples;
    const double v = f.value(std::min(t, seg.t_end));
    if (v > hi + range_tolerance || v < lo - range_tolerance) {
      throw RangeViolationError(
          "corrected F leaves the invertible range [" + std::to_string(lo) +
              ", " + std::to_string(hi) + "] of segment " +
              std::to_string(seg_index) + " at t = " + std::to_string(t) +
              " s (F = " + std::to_string(v) + ")",
          seg_index, t);
    }
  }
}

}  // namespace

ModulationFunction synthesize_corrected_modulation(const SynthesisParams& params) {
  if (params.harmonic_l < 1 || params.harmonic_l % 2 == 0) {
    throw ConfigError("target harmonic l must be odd and positive");
  }
  if (!(params.omega_larmor > 0.0)) {
    throw ConfigError("synthesis requires a positive Larmor frequency");
  }
  if (!(params.sigma_frac > 0.0)) throw ConfigError("sigma_frac must be positive");
  const int l = params.harmonic_l;
  const int k = params.correction_harmonic > 0 ? params.correction_harmonic : l;
  const double period = two_pi * l / params.omega_larmor;
  const double t_pi = optimal_pulse_width(l, period, params.pulse_thirds);

  ModulationFunction f;
  f.period = period;
  f.t_pi = t_pi;
  f.segments = nine_segment_layout(period, t_pi);

  // Each pulse segment gets alpha = -(int F_bare cos)/(int basis cos) so its
  // filter integral vanishes; only the three free gaps then contribute to f_l.
  for (int idx : f.pulse_segment_indices()) {
    ModulationSegment& seg = f.segments[idx];
    const double u0 = seg.t_start / period;
    const double u1 = seg.t_end / period;
    const double sigma = params.sigma_frac * t_pi;
    const double t_mid = 0.5 * (seg.t_start + seg.t_end);
    const int cycles = static_cast<int>(std::ceil(std::max(l, k) * (u1 - u0)));
    auto bare = [&](double u) {
      return conjugation_f(seg.kind, linear_phase(seg, u * period)) *
             std::cos(two_pi * l * u);
    };
    auto basis = [&](double u) {
      const double t = u * period;
      const double arg = (t - t_mid) / sigma;
      return std::cos(two_pi * k * u) * std::exp(-0.5 * arg * arg) *
             std::cos(two_pi * l * u);
    };
    const double num = integrate(bare, u0, u1, 1e-15, 8 + 16 * cycles);
    const double den = integrate(basis, u0, u1, 1e-15, 8 + 16 * cycles);
    if (std::abs(den) < 1e-12 || std::abs(num / den) > 10.0) {
      throw DegenerateBasisError(
          "correction basis barely overlaps the filter on segment " +
          std::to_string(idx) + " (integral " + std::to_string(den) +
          "); choose a different k or sigma");
    }
    seg.correction = GaussianCosineCorrection{-num / den, k, sigma, t_mid};
  }

  for (int idx : f.pulse_segment_indices()) {
    check_segment_range(f, idx);
    const double residual = segment_filter_integral(f, f.segments[idx], l);
    if (std::abs(residual) > 1e-9) {
      throw SolverError("pulse-segment filter integral did not cancel: " +
                        std::to_string(residual));
    }
  }
  return f;
}

double RabiWaveform::max_abs_omega() const {
  double m = 0.0;
  for (const auto& p : pulses) {
    for (double w : p.omega) m = std::max(m, std::abs(w));
  }
  return m;
}

RabiWaveform invert_to_rabi(const ModulationFunction& f, double sample_rate) {
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  // pulse order fixed by the block structure: [+1,-1,+1] at phase 0 then
  // [-1,+1,-1] at phase pi/2
  static constexpr int transitions[6] = {+1, -1, +1, -1, +1, -1};
  static constexpr double phases[6] = {0.0, 0.0, 0.0, 0.5 * pi, 0.5 * pi, 0.5 * pi};

  RabiWaveform wf;
  wf.period = f.period;
  wf.t_pi = f.t_pi;

  const std::vector<int> pulse_indices = f.pulse_segment_indices();
  for (size_t p = 0; p < pulse_indices.size(); ++p) {
    const ModulationSegment& seg = f.segments[pulse_indices[p]];
    const auto [lo, hi] = invertible_range(seg.kind);
    const int n = std::max(4, static_cast<int>(std::ceil(seg.duration() * sample_rate)));
    const double dt = seg.duration() / n;

    std::vector<double> phi(n + 1);
    SampledPulse pulse;
    pulse.transition = transitions[p % 6];
    pulse.base_phase = phases[p % 6];
    pulse.t_start = seg.t_start;
    pulse.duration = seg.duration();
    pulse.t.resize(n + 1);
    pulse.omega.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double t = (i == n) ? seg.t_end : seg.t_start + i * dt;
      double v = f.value(t);
      if (v > hi + range_tolerance || v < lo - range_tolerance) {
        throw RangeViolationError(
            "F outside invertible range during inversion at t = " +
                std::to_string(t) + " s",
            pulse_indices[p], t);
      }
      pulse.t[i] = t;
      phi[i] = phase_from_f(seg.kind, std::clamp(v, lo, hi));
    }

    for (int i = 1; i < n; ++i) {
      pulse.omega[i] = (phi[i + 1] - phi[i - 1]) / dt;  // 2 * centered dphi/dt
    }
    // one-sided edge stencils chosen so the end panels integrate exactly;
    // the corrected F leaves the range boundary with sqrt-like phase growth
    // and a plain forward difference would lose ~1e-4 rad of area there
    pulse.omega[0] = 4.0 * (phi[1] - phi[0]) / dt - pulse.omega[1];
    pulse.omega[n] = 4.0 * (phi[n] - phi[n - 1]) / dt - pulse.omega[n - 1];

    double area = 0.0;  // trapezoid of omega/2
    for (int i = 0; i < n; ++i) {
      area += 0.25 * (pulse.omega[i] + pulse.omega[i + 1]) * dt;
    }
    if (std::abs(area - 0.5 * pi) > 1e-2) {
      throw AreaError("inverted pulse area far from pi/2: " + std::to_string(area));
    }
    const double scale = 0.5 * pi / area;
    for (double& w : pulse.omega) w *= scale;

    wf.pulses.push_back(std::move(pulse));
  }
  return wf;
}

}  // namespace dqm
