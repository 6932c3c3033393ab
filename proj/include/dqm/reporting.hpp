#pragma once

#include <string>
#include <vector>

#include "dqm/config.hpp"
#include "dqm/dynamics.hpp"
#include "dqm/modulation.hpp"
#include "dqm/peaks.hpp"
#include "dqm/sequences.hpp"

namespace dqm {

// scan CSV: '#'-prefixed metadata, then
// omega_D_over_2pi_Hz,signal,one_minus_signal rows
void write_scan_csv(const std::string& path, const SpectrumScan& scan,
                    const std::vector<std::pair<std::string, std::string>>& metadata);

struct FlCoefRow {
  int l = 0;
  double r = 0.0;
  double f_analytic = 0.0;
  double f_quadrature = 0.0;
};
void write_flcoef_csv(const std::string& path, const std::vector<FlCoefRow>& rows);

// one sample per line: time_s rabi_rad_per_s phase_rad transition; negative
// Omega encoded as a pi phase offset
void write_waveform(const std::string& path, const RabiWaveform& waveform);

Json schedule_to_json(const Schedule& schedule);
void write_schedule(const std::string& path, const Schedule& schedule);

// scan CSV reader (for compare)
SpectrumScan read_scan_csv(const std::string& path);

struct CompareReport {
  std::vector<SignalDip> dips_a;
  std::vector<SignalDip> dips_b;
  double position_difference = 0.0;  // rad/s between the deepest dips
};
CompareReport compare_scans(const SpectrumScan& a, const SpectrumScan& b,
                            double prominence_threshold = 0.02);
Json compare_report_to_json(const CompareReport& report);

std::string format_full(double value);  // 17 significant digits

}  // namespace dqm
