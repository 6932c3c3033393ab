#include "dqm/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "dqm/errors.hpp"

namespace dqm {

namespace {

void reject_unknown_keys(const Json& j, const std::set<std::string>& known,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const Json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

std::string protocol_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::DqmInstantaneous: return "dqm-instantaneous";
    case ProtocolKind::DqmTopHat: return "dqm-tophat";
    case ProtocolKind::DqmModulated: return "dqm-modulated";
    case ProtocolKind::Sqm: return "sqm";
  }
  throw ConfigError("unknown protocol kind");
}

ProtocolKind protocol_from_name(const std::string& name) {
  if (name == "dqm-instantaneous") return ProtocolKind::DqmInstantaneous;
  if (name == "dqm-tophat") return ProtocolKind::DqmTopHat;
  if (name == "dqm-modulated") return ProtocolKind::DqmModulated;
  if (name == "sqm") return ProtocolKind::Sqm;
  throw ConfigError("unknown protocol '" + name + "'");
}

RunConfig run_config_from_json(const Json& j) {
  reject_unknown_keys(j, {"system", "protocol", "sequence", "scan", "errors",
                          "solver", "output"},
                      "config");
  RunConfig c;

  const Json& system = j.at("system");
  reject_unknown_keys(system,
                      {"bz_tesla", "nucleus", "gamma_n_2pi_mhz_per_t",
                       "hyperfine_2pi_khz"},
                      "system");
  c.bz_tesla = get_or(system, "bz_tesla", c.bz_tesla);
  c.nucleus = get_or(system, "nucleus", c.nucleus);
  c.gamma_n_2pi_mhz_per_t =
      get_or(system, "gamma_n_2pi_mhz_per_t", c.gamma_n_2pi_mhz_per_t);
  if (system.contains("hyperfine_2pi_khz")) {
    for (const auto& row : system.at("hyperfine_2pi_khz")) {
      if (!row.is_array() || row.size() != 3) {
        throw ConfigError("hyperfine_2pi_khz entries must be 3-vectors");
      }
      c.hyperfine_2pi_khz.push_back(
          {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
  }

  const Json& protocol = j.at("protocol");
  reject_unknown_keys(protocol,
                      {"type", "r", "n", "k", "sigma_frac", "include_gradient"},
                      "protocol");
  c.protocol = protocol_from_name(protocol.at("type").get<std::string>());
  c.tophat_r = get_or(protocol, "r", c.tophat_r);
  c.mod_pulse_thirds = get_or(protocol, "n", c.mod_pulse_thirds);
  c.mod_correction_k = get_or(protocol, "k", c.mod_correction_k);
  c.mod_sigma_frac = get_or(protocol, "sigma_frac", c.mod_sigma_frac);
  c.sqm_include_gradient =
      get_or(protocol, "include_gradient", c.sqm_include_gradient);

  const Json& sequence = j.at("sequence");
  reject_unknown_keys(sequence, {"harmonic_l", "repetitions"}, "sequence");
  c.harmonic_l = get_or(sequence, "harmonic_l", c.harmonic_l);
  c.repetitions = get_or(sequence, "repetitions", c.repetitions);

  if (j.contains("scan")) {
    const Json& scan = j.at("scan");
    reject_unknown_keys(scan, {"center_2pi_hz", "span_2pi_hz", "points"}, "scan");
    c.scan_center_2pi_hz = get_or(scan, "center_2pi_hz", c.scan_center_2pi_hz);
    c.scan_span_2pi_hz = get_or(scan, "span_2pi_hz", c.scan_span_2pi_hz);
    c.scan_points = get_or(scan, "points", c.scan_points);
  }

  if (j.contains("errors")) {
    const Json& errors = j.at("errors");
    reject_unknown_keys(errors, {"rabi_fraction", "detuning_2pi_khz"}, "errors");
    c.rabi_error_fraction = get_or(errors, "rabi_fraction", c.rabi_error_fraction);
    c.detuning_2pi_khz = get_or(errors, "detuning_2pi_khz", c.detuning_2pi_khz);
  }

  if (j.contains("solver")) {
    const Json& solver = j.at("solver");
    reject_unknown_keys(solver, {"step_fraction", "samples_per_larmor"}, "solver");
    c.step_fraction = get_or(solver, "step_fraction", c.step_fraction);
    c.samples_per_larmor =
        get_or(solver, "samples_per_larmor", c.samples_per_larmor);
  }

  if (j.contains("output")) {
    const Json& output = j.at("output");
    reject_unknown_keys(output, {"csv", "waveform", "report"}, "output");
    c.out_csv = get_or<std::string>(output, "csv", c.out_csv);
    c.out_waveform = get_or<std::string>(output, "waveform", c.out_waveform);
    c.out_report = get_or<std::string>(output, "report", c.out_report);
  }

  if (c.scan_points < 0) throw ConfigError("scan points must be >= 0");
  if (c.repetitions < 0) throw ConfigError("repetitions must be >= 0");
  if (c.harmonic_l < 1) throw ConfigError("harmonic_l must be >= 1");
  return c;
}

Json run_config_to_json(const RunConfig& c) {
  Json j;
  j["system"] = Json{{"bz_tesla", c.bz_tesla},
                     {"nucleus", c.nucleus},
                     {"gamma_n_2pi_mhz_per_t", c.gamma_n_2pi_mhz_per_t},
                     {"hyperfine_2pi_khz", c.hyperfine_2pi_khz}};
  Json protocol{{"type", protocol_name(c.protocol)}};
  switch (c.protocol) {
    case ProtocolKind::DqmTopHat:
      protocol["r"] = c.tophat_r;
      break;
    case ProtocolKind::DqmModulated:
      protocol["n"] = c.mod_pulse_thirds;
      protocol["k"] = c.mod_correction_k;
      protocol["sigma_frac"] = c.mod_sigma_frac;
      break;
    case ProtocolKind::Sqm:
      protocol["include_gradient"] = c.sqm_include_gradient;
      break;
    default:
      break;
  }
  j["protocol"] = protocol;
  j["sequence"] = Json{{"harmonic_l", c.harmonic_l}, {"repetitions", c.repetitions}};
  j["scan"] = Json{{"center_2pi_hz", c.scan_center_2pi_hz},
                   {"span_2pi_hz", c.scan_span_2pi_hz},
                   {"points", c.scan_points}};
  j["errors"] = Json{{"rabi_fraction", c.rabi_error_fraction},
                     {"detuning_2pi_khz", c.detuning_2pi_khz}};
  j["solver"] = Json{{"step_fraction", c.step_fraction},
                     {"samples_per_larmor", c.samples_per_larmor}};
  j["output"] = Json{{"csv", c.out_csv},
                     {"waveform", c.out_waveform},
                     {"report", c.out_report}};
  return j;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  return run_config_from_json(j);
}

std::string config_digest(const RunConfig& config) {
  const std::string canonical = run_config_to_json(config).dump();
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char ch : canonical) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

SpinSystem system_from_config(const RunConfig& config) {
  SpinSystem system;
  system.bz = config.bz_tesla;
  if (config.nucleus == "1H") {
    system.constants.gamma_n = two_pi * 42.577e6;
  } else if (config.nucleus == "13C") {
    system.constants.gamma_n = two_pi * 10.705e6;
  } else if (config.nucleus == "custom") {
    system.constants.gamma_n = two_pi * config.gamma_n_2pi_mhz_per_t * 1e6;
  } else {
    throw ConfigError("unknown nucleus '" + config.nucleus +
                      "' (use 1H, 13C or custom)");
  }
  for (const auto& row : config.hyperfine_2pi_khz) {
    system.nuclei.push_back(hyperfine_frame(
        two_pi * 1e3 * Eigen::Vector3d(row[0], row[1], row[2])));
  }
  system.validate();
  return system;
}

PropagationOptions options_from_config(const RunConfig& config) {
  PropagationOptions options;
  options.errors.rabi_error = config.rabi_error_fraction;
  options.errors.detuning = two_pi * 1e3 * config.detuning_2pi_khz;
  options.errors.validate();
  options.step.step_fraction = config.step_fraction;
  options.sqm_include_gradient = config.sqm_include_gradient;
  return options;
}

std::vector<double> scan_grid_from_config(const RunConfig& config) {
  std::vector<double> grid;
  if (config.scan_points == 0) return grid;
  const SpinSystem system = system_from_config(config);
  const double center =
      config.scan_center_2pi_hz >= 0.0
          ? two_pi * config.scan_center_2pi_hz
          : system.larmor_frequency() / config.harmonic_l;
  const double span = two_pi * config.scan_span_2pi_hz;
  if (config.scan_points == 1) {
    grid.push_back(center);
    return grid;
  }
  for (int i = 0; i < config.scan_points; ++i) {
    grid.push_back(center - 0.5 * span +
                   span * i / (config.scan_points - 1));
  }
  return grid;
}

SynthesisResult synthesize_from_config(const RunConfig& config) {
  const SpinSystem system = system_from_config(config);
  SynthesisParams params;
  params.harmonic_l = config.harmonic_l;
  params.pulse_thirds = config.mod_pulse_thirds;
  params.correction_harmonic = config.mod_correction_k;
  params.sigma_frac = config.mod_sigma_frac;
  params.omega_larmor = system.larmor_frequency();

  SynthesisResult result;
  result.modulation = synthesize_corrected_modulation(params);
  const double sample_rate =
      config.samples_per_larmor / system.larmor_period();
  result.waveform = invert_to_rabi(result.modulation, sample_rate);
  result.achieved_f_l = fourier_coefficient(result.modulation, config.harmonic_l);
  result.t_pi_pulse = result.modulation.t_pi;
  result.t_pi_block = 3.0 * result.modulation.t_pi;
  result.max_abs_omega = result.waveform.max_abs_omega();
  return result;
}

ScheduleFactory schedule_factory_from_config(const RunConfig& config,
                                             const SpinSystem& system) {
  const long long reps = config.repetitions;
  if (config.protocol != ProtocolKind::Sqm && reps % 2 != 0) {
    throw ConfigError("DQM protocols need an even repetition count");
  }
  switch (config.protocol) {
    case ProtocolKind::DqmInstantaneous:
      return [reps](double omega_d) {
        return build_dqm_schedule_instantaneous(omega_d, reps);
      };
    case ProtocolKind::DqmTopHat: {
      // t_pi anchored to the Larmor period, held fixed across the scan
      const double t_pi = config.tophat_r * system.larmor_period();
      return [reps, t_pi](double omega_d) {
        return build_dqm_schedule_tophat(omega_d, t_pi, reps);
      };
    }
    case ProtocolKind::DqmModulated: {
      auto waveform = std::make_shared<RabiWaveform>(
          synthesize_from_config(config).waveform);
      return [reps, waveform](double omega_d) {
        return build_dqm_schedule_modulated(*waveform, omega_d, reps);
      };
    }
    case ProtocolKind::Sqm:
      return [reps](double omega_d) { return build_sqm_schedule(omega_d, reps); };
  }
  throw ConfigError("unknown protocol kind");
}

}  // namespace dqm
