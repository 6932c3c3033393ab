#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqm/dynamics.hpp"
#include "dqm/modulation.hpp"
#include "dqm/spin_system.hpp"

namespace dqm {

using Json = nlohmann::ordered_json;

enum class ProtocolKind { DqmInstantaneous, DqmTopHat, DqmModulated, Sqm };

std::string protocol_name(ProtocolKind kind);
ProtocolKind protocol_from_name(const std::string& name);

// Declarative run description. All quantities carry their unit in the key
// name; hyperfine vectors are entered as (2 pi) x kHz triples.
struct RunConfig {
  // system
  double bz_tesla = 3.0;
  std::string nucleus = "1H";                    // or "custom"
  double gamma_n_2pi_mhz_per_t = 42.577;         // used when nucleus == "custom"
  std::vector<std::array<double, 3>> hyperfine_2pi_khz;

  // protocol
  ProtocolKind protocol = ProtocolKind::DqmInstantaneous;
  double tophat_r = 0.889;         // dqm-tophat
  int mod_pulse_thirds = 21;       // dqm-modulated: n
  int mod_correction_k = 0;        // 0 -> k = l
  double mod_sigma_frac = 1.0 / 6.0;
  bool sqm_include_gradient = true;

  // sequence
  int harmonic_l = 43;
  long long repetitions = 1;

  // scan grid; center < 0 selects the resonance omega_L / l
  double scan_center_2pi_hz = -1.0;
  double scan_span_2pi_hz = 0.0;
  int scan_points = 0;

  // error model
  double rabi_error_fraction = 0.0;
  double detuning_2pi_khz = 0.0;

  // solver
  double step_fraction = 1.0 / 40.0;
  double samples_per_larmor = 256.0;

  // outputs (optional; subcommands may override)
  std::string out_csv;
  std::string out_waveform;
  std::string out_report;
};

RunConfig run_config_from_json(const Json& j);
Json run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::string& path);

// FNV-1a hash of the canonical serialization, hex encoded
std::string config_digest(const RunConfig& config);

// ---------------------------------------------------------------------------
// Wiring a config into simulation inputs
// ---------------------------------------------------------------------------

SpinSystem system_from_config(const RunConfig& config);
PropagationOptions options_from_config(const RunConfig& config);
std::vector<double> scan_grid_from_config(const RunConfig& config);

// waveform synthesis for the dqm-modulated protocol
struct SynthesisResult {
  ModulationFunction modulation;
  RabiWaveform waveform;
  double achieved_f_l = 0.0;
  double t_pi_pulse = 0.0;  // single pulse width
  double t_pi_block = 0.0;  // effective S_z pi time (three-pulse block)
  double max_abs_omega = 0.0;
};
SynthesisResult synthesize_from_config(const RunConfig& config);

// schedule factory for scans under the configured protocol
ScheduleFactory schedule_factory_from_config(const RunConfig& config,
                                             const SpinSystem& system);

}  // namespace dqm
