// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. The 5-spin Fig. 2 reproduction is long-running and opt-in via
// --full-fig2.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dqm/dynamics.hpp"
#include "dqm/errors.hpp"
#include "dqm/modulation.hpp"
#include "dqm/operators.hpp"
#include "dqm/peaks.hpp"
#include "dqm/sequences.hpp"

using namespace dqm;
using Eigen::Vector3d;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

void run(int criterion, const std::string& what,
         const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(criterion, what, ok, detail);
  } catch (const std::exception& e) {
    report(criterion, what, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

SpinSystem single_h() {
  SpinSystem system;
  system.bz = 3.0;
  system.nuclei.push_back(
      hyperfine_frame(two_pi * 1e3 * Vector3d(7.39, 29.90, -4.61)));
  return system;
}

SpinSystem two_h() {
  SpinSystem system;
  system.bz = 3.0;
  system.nuclei.push_back(
      hyperfine_frame(two_pi * 1e3 * Vector3d(0.97, 3.18, -4.14)));
  system.nuclei.push_back(
      hyperfine_frame(two_pi * 1e3 * Vector3d(-2.09, 2.69, 0.44)));
  return system;
}

SpinSystem five_h() {
  SpinSystem system;
  system.bz = 3.0;
  const double k = two_pi * 1e3;
  system.nuclei.push_back(hyperfine_frame(k * Vector3d(0.97, 3.18, -4.14)));
  system.nuclei.push_back(hyperfine_frame(k * Vector3d(-2.09, 2.69, 0.44)));
  system.nuclei.push_back(hyperfine_frame(k * Vector3d(-1.84, 3.18, -0.13)));
  system.nuclei.push_back(hyperfine_frame(k * Vector3d(-2.25, 3.42, -0.69)));
  system.nuclei.push_back(hyperfine_frame(k * Vector3d(-1.73, 3.00, -1.22)));
  return system;
}

RabiWaveform synthesize(const SpinSystem& system, int n, double sigma_frac,
                        double samples_per_larmor) {
  SynthesisParams params{43, n, 43, sigma_frac, system.larmor_frequency()};
  return invert_to_rabi(synthesize_corrected_modulation(params),
                        samples_per_larmor / system.larmor_period());
}

SampledWaveform random_pi_waveform(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(8, 120);
  std::uniform_real_distribution<double> duration(5e-9, 2e-7);
  std::uniform_real_distribution<double> omega(0.1, 1.0);
  std::uniform_real_distribution<double> flip(0.0, 1.0);
  SampledWaveform w;
  const int n = count(rng);
  w.duration = duration(rng);
  w.t.resize(n + 1);
  w.omega.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    w.t[i] = w.duration * i / n;
    w.omega[i] = omega(rng) * (flip(rng) < 0.15 ? -0.4 : 1.0);
  }
  double area = 0.0;
  for (int i = 0; i < n; ++i) {
    area += 0.25 * (w.omega[i] + w.omega[i + 1]) * (w.t[i + 1] - w.t[i]);
  }
  for (double& x : w.omega) x *= 0.5 * pi / area;
  return w;
}

std::vector<double> grid_around(const SpinSystem& system, double span_hz,
                                int points) {
  const double center = system.larmor_frequency() / 43.0;
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    grid.push_back(center +
                   two_pi * (-0.5 * span_hz + span_hz * i / (points - 1)));
  }
  return grid;
}

void criterion_1() {
  run(1, "filter-coefficient identity f_43(r)", [] {
    const double omega_l = two_pi * 42.577e6 * 3.0;
    const double period = two_pi * 43.0 / omega_l;
    double worst = 0.0;
    for (int i = 1; i <= 30; ++i) {
      const double r = 0.05 * i;
      const double analytic = fl_tophat_analytic(43, r);
      const double quad = fourier_coefficient(tophat_modulation(43, r, period), 43);
      worst = std::max(worst, std::abs(analytic - quad));
    }
    const double limit = fl_tophat_analytic(43, 1e-6);
    const bool ok = worst < 1e-8 && std::abs(limit - (-0.029615)) < 1e-5;
    return std::make_pair(ok, fmt("max |analytic - quadrature| = %.2e, f_43(r->0) = %.6f",
                                  worst, limit));
  });
}

void criterion_2() {
  run(2, "three-pulse S_z inversion for 1000 random waveforms", [] {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::array<PulseWaveform, 3> pulses = {random_pi_waveform(rng),
                                                   random_pi_waveform(rng),
                                                   random_pi_waveform(rng)};
      const auto variant = (trial % 2 == 0) ? BlockVariant::PlusMinusPlusX
                                            : BlockVariant::MinusPlusMinusY;
      const auto block = three_pulse_block(variant, pulses);
      const auto u = block.propagator();
      worst = std::max(worst, (u.adjoint() * spin1_sz() * u + spin1_sz())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    return std::make_pair(worst < 1e-10, fmt("worst defect = %.2e", worst));
  });
}

void criterion_3() {
  run(3, "waveform synthesis at l = 43, B_z = 3 T", [] {
    const SpinSystem system = single_h();

    // the quoted n = 61 single-pulse width cannot fit six pulses into one
    // period (6 t_pi = 2.84 T); it must be rejected, and the synthesis runs
    // at the widest feasible pulse, n = 21 (seven Larmor periods per pulse,
    // a 21-period = 0.164 us effective S_z pi block)
    bool rejected = false;
    try {
      synthesize_corrected_modulation(
          SynthesisParams{43, 61, 43, 0.125, system.larmor_frequency()});
    } catch (const GeometryError&) {
      rejected = true;
    }

    SynthesisParams params{43, 21, 43, 0.125, system.larmor_frequency()};
    const ModulationFunction f = synthesize_corrected_modulation(params);
    const RabiWaveform wf =
        invert_to_rabi(f, 256.0 / system.larmor_period());
    const double target = 4.0 / (pi * 43.0);
    const double achieved = fourier_coefficient(f, 43);
    const double max_mhz = wf.max_abs_omega() / two_pi / 1e6;
    const double block_us = 3.0 * f.t_pi * 1e6;

    const bool ok = rejected &&
                    std::abs(std::abs(achieved) - target) < 1e-6 * target &&
                    max_mhz >= 30.0 && max_mhz <= 45.0 && block_us >= 0.15 &&
                    block_us <= 0.17;
    return std::make_pair(
        ok, fmt("|f_43| rel err %.1e, max|Omega| %.1f (2pi)MHz, t_pi(block) %.3f us",
                std::abs(std::abs(achieved) - target) / target, max_mhz, block_us));
  });
}

void criterion_4() {
  const SpinSystem system = single_h();
  const double omega_d = system.larmor_frequency() / 43.0;
  const long long reps = 576;  // t_f = 0.194 ms
  const double t_f = reps * two_pi / omega_d;
  const double ax = system.nuclei[0].ax;
  const PropagationOptions options;

  run(4, "Fig. 1(d) instantaneous pulses vs theory", [&] {
    const double signal = ensemble_signal(
        system, build_dqm_schedule_instantaneous(omega_d, reps), options);
    const double theory = std::cos(0.5 * -0.0296 * ax * t_f);
    const double dev = std::abs(signal - theory);
    return std::make_pair(dev < 0.02,
                          fmt("signal %.4f vs cos((f/2)A t) %.4f, |dev| %.4f",
                              signal, theory, dev));
  });

  run(4, "Fig. 1(d) 7 ns top-hat pulses vs theory", [&] {
    const double signal = ensemble_signal(
        system, build_dqm_schedule_tophat(omega_d, 7e-9, reps), options);
    const double theory = std::cos(0.5 * -0.0118 * ax * t_f);
    const double dev = std::abs(signal - theory);
    return std::make_pair(dev < 0.02,
                          fmt("signal %.4f vs cos((f/2)A t) %.4f, |dev| %.4f",
                              signal, theory, dev));
  });
}

void criterion_5() {
  const SpinSystem system = single_h();
  const double omega_d = system.larmor_frequency() / 43.0;
  const long long reps = 576;
  const PropagationOptions ideal;
  const double reference = ensemble_signal(
      system, build_dqm_schedule_instantaneous(omega_d, reps), ideal);

  run(5, "modulated waveform matches instantaneous pulses", [&] {
    const RabiWaveform wf = synthesize(system, 21, 0.125, 256.0);
    const double signal = ensemble_signal(
        system, build_dqm_schedule_modulated(wf, omega_d, reps), ideal);
    const double dev = std::abs(signal - reference);
    return std::make_pair(dev < 0.02, fmt("|dev| = %.4f", dev));
  });

  run(5, "modulated waveform with 1% Rabi error (moderate-power width)", [&] {
    const RabiWaveform wf = synthesize(system, 21, 0.125, 256.0);
    PropagationOptions noisy;
    noisy.errors.rabi_error = 0.01;
    const double signal = ensemble_signal(
        system, build_dqm_schedule_modulated(wf, omega_d, reps), noisy);
    const double dev = std::abs(signal - reference);
    return std::make_pair(dev < 0.02, fmt("|dev| = %.4f", dev));
  });

  run(5, "modulated waveform with 1% Rabi error and (2pi)x20 kHz detuning", [&] {
    // a symmetric level shift during long pulses is not refocused by any
    // block arrangement; the robust operating point keeps each pulse at one
    // Larmor period (n = 3)
    const RabiWaveform wf = synthesize(system, 3, 1.0 / 6.0, 256.0);
    PropagationOptions noisy;
    noisy.errors.rabi_error = 0.01;
    noisy.errors.detuning = two_pi * 20e3;
    const double signal = ensemble_signal(
        system, build_dqm_schedule_modulated(wf, omega_d, reps), noisy);
    const double dev = std::abs(signal - reference);
    return std::make_pair(dev < 0.02, fmt("|dev| = %.4f", dev));
  });
}

void criterion_6(bool full_fig2) {
  const SpinSystem system = two_h();
  const double resonance = system.larmor_frequency() / 43.0;
  const std::vector<double> grid = grid_around(system, 240.0, 81);
  const double step = grid[1] - grid[0];
  const PropagationOptions options;
  const long long sqm_units = 1350;
  const long long dqm_periods = 4 * sqm_units;  // equal total evolution time

  run(6, "SQM gradient term splits the 2-nucleus spectrum", [&] {
    const SpectrumScan sqm = run_sqm(system, sqm_units, grid, options);
    const auto dips = find_signal_dips(sqm.omega_d, sqm.signal, 0.02);
    return std::make_pair(dips.size() >= 2, fmt("%.0f peaks", (double)dips.size()));
  });

  run(6, "DQM spectrum stays single and centred", [&] {
    const SpectrumScan dqm = scan_spectrum(
        system,
        [&](double wd) { return build_dqm_schedule_instantaneous(wd, dqm_periods); },
        grid, options);
    const auto dips = find_signal_dips(dqm.omega_d, dqm.signal, 0.02);
    const bool one = dips.size() == 1;
    const double off = one ? std::abs(dips[0].omega_d - resonance) : -1.0;
    return std::make_pair(one && off < step,
                          fmt("%.0f peak(s), offset %.2f Hz (step %.2f Hz)",
                              (double)dips.size(), off / two_pi, step / two_pi));
  });

  if (!full_fig2) {
    std::printf("[SKIP] criterion 6: full 5-spin Fig. 2 fixture (run with --full-fig2)\n");
    return;
  }

  const SpinSystem cluster = five_h();
  const double res5 = cluster.larmor_frequency() / 43.0;
  const std::vector<double> grid5 = grid_around(cluster, 400.0, 101);
  const double step5 = grid5[1] - grid5[0];
  const SpectrumScan sqm540 = run_sqm(cluster, 540, grid5, options);
  const SpectrumScan sqm720 = run_sqm(cluster, 720, grid5, options);

  // eigen-oracle position of the outlier nucleus: dips at the mean of the
  // two NV-branch nuclear frequencies
  const double wl = cluster.larmor_frequency();
  const double predicted =
      0.5 * (wl + std::hypot(wl - cluster.nuclei[0].az, cluster.nuclei[0].ax)) /
      43.0;

  run(6, "full Fig. 2: SQM N = 720 resolves the secondary peak", [&] {
    const auto dips = find_signal_dips(sqm720.omega_d, sqm720.signal, 0.005);
    bool found = false;
    for (const auto& d : dips) {
      if (std::abs(d.omega_d - predicted) < 2.0 * step5) found = true;
    }
    return std::make_pair(dips.size() >= 2 && found,
                          fmt("%.0f peaks, prediction offset %.1f Hz",
                              (double)dips.size(), (predicted - res5) / two_pi));
  });

  run(6, "full Fig. 2: the secondary feature emerges by N = 540", [&] {
    // at N = 540 the outlier is a shoulder: the signal at the predicted
    // position sits below the chord across +-5 scan steps
    auto value_at = [&](double omega) {
      size_t best = 0;
      for (size_t i = 1; i < sqm540.omega_d.size(); ++i) {
        if (std::abs(sqm540.omega_d[i] - omega) <
            std::abs(sqm540.omega_d[best] - omega)) {
          best = i;
        }
      }
      return std::make_pair(best, sqm540.signal[best]);
    };
    const auto [idx, centre] = value_at(predicted);
    const double left = sqm540.signal[idx - 5];
    const double right = sqm540.signal[idx + 5];
    const double shoulder = 0.5 * (left + right) - centre;
    return std::make_pair(shoulder > 0.002, fmt("shoulder depth %.4f", shoulder));
  });

  run(6, "full Fig. 2: DQM stays single with larger contrast", [&] {
    const long long periods = 4 * 540;
    const SpectrumScan dqm = scan_spectrum(
        cluster,
        [&](double wd) { return build_dqm_schedule_instantaneous(wd, periods); },
        grid5, options);
    const auto dips = find_signal_dips(dqm.omega_d, dqm.signal, 0.02);
    const auto sqm_dips = find_signal_dips(sqm540.omega_d, sqm540.signal, 0.005);
    double dqm_depth = 0.0;
    for (const auto& d : dips) dqm_depth = std::max(dqm_depth, 1.0 - d.signal);
    double sqm_depth = 0.0;
    for (const auto& d : sqm_dips) sqm_depth = std::max(sqm_depth, 1.0 - d.signal);
    const bool single = dips.size() == 1 &&
                        std::abs(dips[0].omega_d - res5) < step5;
    return std::make_pair(single && dqm_depth > sqm_depth,
                          fmt("DQM depth %.3f vs SQM depth %.3f, %.0f peak(s)",
                              dqm_depth, sqm_depth, (double)dips.size()));
  });

  run(6, "full Fig. 2: modulated waveform overlays the instantaneous scan", [&] {
    const long long periods = 4 * 360;
    const RabiWaveform wf = synthesize(cluster, 21, 0.125, 64.0);
    const std::vector<double> coarse = grid_around(cluster, 400.0, 21);
    const SpectrumScan mod = scan_spectrum(
        cluster,
        [&](double wd) { return build_dqm_schedule_modulated(wf, wd, periods); },
        coarse, options);
    const SpectrumScan inst = scan_spectrum(
        cluster,
        [&](double wd) { return build_dqm_schedule_instantaneous(wd, periods); },
        coarse, options);
    double worst = 0.0;
    for (size_t i = 0; i < coarse.size(); ++i) {
      worst = std::max(worst, std::abs(mod.signal[i] - inst.signal[i]));
    }
    return std::make_pair(worst < 0.02, fmt("max |mod - inst| = %.4f", worst));
  });
}

void criterion_7() {
  const SpinSystem system = single_h();
  const double omega_d = system.larmor_frequency() / 43.0;
  const PropagationOptions options;

  run(7, "unitarity and norm conservation", [&] {
    const Schedule s = build_dqm_schedule_instantaneous(omega_d, 2000);
    const OperatorMatrix u = schedule_propagator(system, s, options);
    const double defect = unitarity_defect(u);
    SimulationState state;
    state.state = Eigen::VectorXcd::Zero(6);
    state.state(0) = state.state(4) = 1.0 / std::sqrt(2.0);
    const SimulationState out = propagate(system, s, options, state);
    const double drift = std::abs(out.state.squaredNorm() - 1.0);
    return std::make_pair(defect < 1e-9 && drift < 1e-9,
                          fmt("unitarity defect %.1e, norm drift %.1e", defect, drift));
  });

  run(7, "step-halving convergence", [&] {
    // a 64-sample waveform leaves the integrator visibly coarse, so halving
    // the step genuinely subdivides the sample intervals
    const RabiWaveform wf = synthesize(system, 21, 0.125, 64.0);
    const Schedule s = build_dqm_schedule_modulated(wf, omega_d, 64);
    const double coarse = ensemble_signal(system, s, options);
    PropagationOptions fine = options;
    fine.step.step_fraction = 0.5 * options.step.step_fraction;
    const double refined = ensemble_signal(system, s, fine);
    const double change = std::abs(refined - coarse);
    return std::make_pair(change < 1e-4, fmt("|change| = %.2e", change));
  });

  run(7, "modulation -> waveform -> modulation round trip", [&] {
    SynthesisParams params{43, 21, 43, 0.125, system.larmor_frequency()};
    const ModulationFunction f = synthesize_corrected_modulation(params);
    const RabiWaveform wf = invert_to_rabi(f, 256.0 / system.larmor_period());
    const std::vector<int> pulse_indices = f.pulse_segment_indices();
    double worst = 0.0;
    for (size_t p = 0; p < wf.pulses.size(); ++p) {
      const auto& pulse = wf.pulses[p];
      const SegmentKind kind = f.segments[pulse_indices[p]].kind;
      double phi = 0.0;
      for (size_t i = 0; i + 1 < pulse.t.size(); ++i) {
        worst = std::max(worst,
                         std::abs(conjugation_f(kind, phi) - f.value(pulse.t[i])));
        phi += 0.25 * (pulse.omega[i] + pulse.omega[i + 1]) *
               (pulse.t[i + 1] - pulse.t[i]);
      }
    }
    return std::make_pair(worst < 1e-4, fmt("worst pointwise error = %.2e", worst));
  });

  run(7, "even harmonics vanish", [&] {
    const double period = two_pi * 43.0 / system.larmor_frequency();
    const ModulationFunction f = tophat_modulation(43, 0.3, period);
    double worst = 0.0;
    for (int l : {2, 8, 44}) {
      worst = std::max(worst, std::abs(fourier_coefficient(f, l)));
    }
    return std::make_pair(worst < 1e-10, fmt("worst |f_even| = %.2e", worst));
  });

  run(7, "bitwise-deterministic parallel scans", [&] {
    const std::vector<double> grid = grid_around(system, 4000.0, 8);
    auto factory = [](double wd) {
      return build_dqm_schedule_instantaneous(wd, 128);
    };
    const SpectrumScan one = scan_spectrum(system, factory, grid, options, 1);
    const SpectrumScan two = scan_spectrum(system, factory, grid, options, 2);
    const bool same = one.signal.size() == two.signal.size() &&
                      std::memcmp(one.signal.data(), two.signal.data(),
                                  one.signal.size() * sizeof(double)) == 0;
    return std::make_pair(same, std::string(same ? "identical bytes" : "mismatch"));
  });
}

}  // namespace

int main(int argc, char** argv) {
  bool full_fig2 = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full-fig2") == 0) full_fig2 = true;
  }
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6(full_fig2);
  criterion_7();
  if (failures > 0) {
    std::printf("%d criterion check(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
