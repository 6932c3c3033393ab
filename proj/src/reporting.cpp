#include "dqm/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dqm/errors.hpp"

namespace dqm {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file '" + path + "'");
  return out;
}

}  // namespace

std::string format_full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", value);
  return buf;
}

void write_scan_csv(const std::string& path, const SpectrumScan& scan,
                    const std::vector<std::pair<std::string, std::string>>& metadata) {
  for (size_t i = 0; i < scan.omega_d.size(); ++i) {
    if (!(scan.omega_d[i] > 0.0)) {
      throw SolverError("scan holds a non-positive drive frequency");
    }
    if (std::abs(scan.signal[i]) > 1.0 + 1e-9) {
      throw SolverError("scan signal left [-1, 1]");
    }
  }
  std::ofstream out = open_out(path);
  out << "# dqmag scan\n";
  for (const auto& [key, value] : metadata) {
    out << "# " << key << ": " << value << "\n";
  }
  out << "omega_D_over_2pi_Hz,signal,one_minus_signal\n";
  for (size_t i = 0; i < scan.omega_d.size(); ++i) {
    out << format_full(scan.omega_d[i] / two_pi) << ','
        << format_full(scan.signal[i]) << ','
        << format_full(1.0 - scan.signal[i]) << '\n';
  }
}

void write_flcoef_csv(const std::string& path, const std::vector<FlCoefRow>& rows) {
  std::ofstream out = open_out(path);
  out << "# dqmag flcoef\n";
  out << "l,r,f_analytic,f_quadrature,abs_diff\n";
  for (const auto& row : rows) {
    out << row.l << ',' << format_full(row.r) << ','
        << format_full(row.f_analytic) << ',' << format_full(row.f_quadrature)
        << ',' << format_full(std::abs(row.f_analytic - row.f_quadrature))
        << '\n';
  }
}

void write_waveform(const std::string& path, const RabiWaveform& waveform) {
  std::ofstream out = open_out(path);
  out << "# dqmag waveform\n";
  out << "# period_s: " << format_full(waveform.period) << "\n";
  out << "# t_pi_s: " << format_full(waveform.t_pi) << "\n";
  out << "# columns: time_s rabi_rad_per_s phase_rad transition\n";
  for (const auto& pulse : waveform.pulses) {
    for (size_t i = 0; i < pulse.t.size(); ++i) {
      const double omega = pulse.omega[i];
      const double phase = pulse.base_phase + (omega < 0.0 ? pi : 0.0);
      out << format_full(pulse.t[i]) << ' ' << format_full(std::abs(omega)) << ' '
          << format_full(phase) << ' ' << pulse.transition << '\n';
    }
  }
}

namespace {

Json waveform_item_to_json(const PulseWaveform& w) {
  Json j;
  if (std::holds_alternative<InstantaneousWaveform>(w)) {
    j["kind"] = "instantaneous";
  } else if (const auto* th = std::get_if<TopHatWaveform>(&w)) {
    j["kind"] = "tophat";
    j["omega_rad_per_s"] = th->omega;
    j["duration_s"] = th->duration;
  } else {
    const auto& s = std::get<SampledWaveform>(w);
    j["kind"] = "sampled";
    j["duration_s"] = s.duration;
    j["samples"] = s.t.size();
  }
  return j;
}

}  // namespace

Json schedule_to_json(const Schedule& schedule) {
  Json j;
  j["frame"] = schedule.frame == ScheduleFrame::NvSpin1 ? "nv-spin-1" : "sqm-qubit";
  j["period_s"] = schedule.period;
  j["repetitions"] = schedule.repetitions;
  j["pulses_per_period"] = schedule.pulses_per_period();
  j["total_time_s"] = schedule.total_time();
  Json items = Json::array();
  for (const auto& item : schedule.period_items) {
    Json entry;
    if (const auto* gap = std::get_if<FreeGap>(&item)) {
      entry["item"] = "free-gap";
      entry["duration_s"] = gap->duration;
    } else if (const auto* block = std::get_if<ThreePulseBlock>(&item)) {
      entry["item"] = "three-pulse-block";
      entry["variant"] = block->variant == BlockVariant::PlusMinusPlusX
                             ? "plus-minus-plus-x"
                             : "minus-plus-minus-y";
      Json pulses = Json::array();
      for (const auto& p : block->pulses) {
        Json pj = waveform_item_to_json(p.waveform);
        pj["transition"] = p.transition;
        pj["phase_rad"] = p.phase;
        pulses.push_back(pj);
      }
      entry["pulses"] = pulses;
    } else {
      const auto& flip = std::get<QubitFlip>(item);
      entry["item"] = "qubit-flip";
      entry["phase_rad"] = flip.phase;
    }
    items.push_back(entry);
  }
  j["period_items"] = items;
  return j;
}

void write_schedule(const std::string& path, const Schedule& schedule) {
  std::ofstream out = open_out(path);
  out << schedule_to_json(schedule).dump(2) << '\n';
}

SpectrumScan read_scan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scan file '" + path + "'");
  SpectrumScan scan;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header row
      continue;
    }
    std::istringstream ss(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(ss, field, ',')) values.push_back(std::stod(field));
    if (values.size() < 2) throw Error("malformed scan row in '" + path + "'");
    scan.omega_d.push_back(two_pi * values[0]);
    scan.signal.push_back(values[1]);
  }
  return scan;
}

CompareReport compare_scans(const SpectrumScan& a, const SpectrumScan& b,
                            double prominence_threshold) {
  if (a.omega_d.size() != b.omega_d.size()) {
    throw ConfigError("scan ranges are misaligned (different lengths)");
  }
  for (size_t i = 0; i < a.omega_d.size(); ++i) {
    const double scale = std::max(std::abs(a.omega_d[i]), 1.0);
    if (std::abs(a.omega_d[i] - b.omega_d[i]) > 1e-9 * scale) {
      throw ConfigError("scan ranges are misaligned at index " + std::to_string(i));
    }
  }
  CompareReport report;
  report.dips_a = find_signal_dips(a.omega_d, a.signal, prominence_threshold);
  report.dips_b = find_signal_dips(b.omega_d, b.signal, prominence_threshold);
  const auto deepest = [](const std::vector<SignalDip>& dips) -> const SignalDip* {
    const SignalDip* best = nullptr;
    for (const auto& d : dips) {
      if (!best || d.signal < best->signal) best = &d;
    }
    return best;
  };
  const SignalDip* da = deepest(report.dips_a);
  const SignalDip* db = deepest(report.dips_b);
  if (da && db) report.position_difference = da->omega_d - db->omega_d;
  return report;
}

Json compare_report_to_json(const CompareReport& report) {
  auto dips_to_json = [](const std::vector<SignalDip>& dips) {
    Json arr = Json::array();
    for (const auto& d : dips) {
      arr.push_back(Json{{"omega_d_over_2pi_hz", d.omega_d / two_pi},
                         {"signal", d.signal},
                         {"depth", 1.0 - d.signal},
                         {"prominence", d.prominence}});
    }
    return arr;
  };
  Json j;
  j["peaks_a"] = dips_to_json(report.dips_a);
  j["peaks_b"] = dips_to_json(report.dips_b);
  j["peak_count_a"] = report.dips_a.size();
  j["peak_count_b"] = report.dips_b.size();
  j["deepest_position_difference_2pi_hz"] = report.position_difference / two_pi;
  return j;
}

}  // namespace dqm
