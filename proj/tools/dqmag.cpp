// Batch front end: filter-coefficient tables, waveform synthesis, spectrum
// scans and DQM/SQM comparisons. Subcommands write CSV and waveform files;
// plotting is left to the user.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dqm/config.hpp"
#include "dqm/errors.hpp"
#include "dqm/modulation.hpp"
#include "dqm/reporting.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_synthesis = 3;
constexpr int exit_solver = 4;
constexpr int exit_io = 5;

struct FlCoefArgs {
  std::vector<int> harmonics{37, 43};
  double r_min = 0.05;
  double r_max = 1.5;
  double r_step = 0.05;
  std::string out = "flcoef.csv";
};

int cmd_flcoef(const FlCoefArgs& args) {
  std::vector<dqm::FlCoefRow> rows;
  for (int l : args.harmonics) {
    if (l < 1 || l % 2 == 0) {
      throw dqm::ConfigError("flcoef harmonics must be odd and positive");
    }
    for (double r = args.r_min; r <= args.r_max + 1e-12; r += args.r_step) {
      // quadrature needs the constructed F(t); any period works, the
      // coefficient is scale-free. r = 0 rows use a vanishing pulse width
      // for the constructed side.
      const double period = 1e-6;
      dqm::FlCoefRow row;
      row.l = l;
      row.r = r;
      row.f_analytic = dqm::fl_tophat_analytic(l, r);
      row.f_quadrature = dqm::fourier_coefficient(
          dqm::tophat_modulation(l, std::max(r, 1e-9), period), l);
      rows.push_back(row);
    }
  }
  dqm::write_flcoef_csv(args.out, rows);
  std::cout << "wrote " << rows.size() << " rows to " << args.out << "\n";
  return exit_ok;
}

struct SynthArgs {
  std::string config;
  std::string waveform_out;
  std::string report_out;
  std::string schedule_out;
};

int cmd_synth(const SynthArgs& args) {
  dqm::RunConfig config = dqm::load_run_config(args.config);
  if (config.protocol != dqm::ProtocolKind::DqmModulated) {
    throw dqm::ConfigError("synth requires protocol type dqm-modulated");
  }
  const dqm::SynthesisResult result = dqm::synthesize_from_config(config);

  const std::string waveform_path =
      !args.waveform_out.empty() ? args.waveform_out : config.out_waveform;
  if (!waveform_path.empty()) dqm::write_waveform(waveform_path, result.waveform);

  dqm::Json report;
  report["config_digest"] = dqm::config_digest(config);
  report["achieved_f_l"] = result.achieved_f_l;
  report["target_abs_f_l"] = 4.0 / (dqm::pi * config.harmonic_l);
  report["max_abs_rabi_rad_per_s"] = result.max_abs_omega;
  report["max_abs_rabi_2pi_mhz"] = result.max_abs_omega / dqm::two_pi / 1e6;
  report["t_pi_pulse_s"] = result.t_pi_pulse;
  report["t_pi_block_s"] = result.t_pi_block;
  report["period_s"] = result.modulation.period;
  const std::string report_path =
      !args.report_out.empty() ? args.report_out : config.out_report;
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw dqm::Error("cannot open report file '" + report_path + "'");
    out << report.dump(2) << "\n";
  }

  if (!args.schedule_out.empty()) {
    const dqm::SpinSystem system = dqm::system_from_config(config);
    const double omega_d = system.larmor_frequency() / config.harmonic_l;
    dqm::write_schedule(args.schedule_out,
                        dqm::build_dqm_schedule_modulated(
                            result.waveform, omega_d, config.repetitions));
  }

  std::cout << "f_" << config.harmonic_l << " = " << result.achieved_f_l
            << " (target |f| = " << 4.0 / (dqm::pi * config.harmonic_l) << ")\n"
            << "max |Omega| = " << result.max_abs_omega / dqm::two_pi / 1e6
            << " (2pi) MHz\n"
            << "t_pi (pulse) = " << result.t_pi_pulse * 1e9 << " ns, "
            << "t_pi (S_z block) = " << result.t_pi_block * 1e9 << " ns\n";
  if (!waveform_path.empty()) std::cout << "waveform: " << waveform_path << "\n";
  return exit_ok;
}

struct ScanArgs {
  std::string config;
  std::string out;
  std::string schedule_out;
  int workers = 0;
};

int cmd_scan(const ScanArgs& args) {
  dqm::RunConfig config = dqm::load_run_config(args.config);
  const dqm::SpinSystem system = dqm::system_from_config(config);
  const dqm::PropagationOptions options = dqm::options_from_config(config);
  const std::vector<double> grid = dqm::scan_grid_from_config(config);
  const dqm::ScheduleFactory factory =
      dqm::schedule_factory_from_config(config, system);

  if (!args.schedule_out.empty()) {
    const double omega_d = system.larmor_frequency() / config.harmonic_l;
    dqm::write_schedule(args.schedule_out, factory(omega_d));
  }

  const dqm::SpectrumScan scan =
      dqm::scan_spectrum(system, factory, grid, options, args.workers);

  const std::string out_path = !args.out.empty() ? args.out : config.out_csv;
  if (out_path.empty()) throw dqm::ConfigError("no output CSV path configured");
  dqm::write_scan_csv(
      out_path, scan,
      {{"config-digest", dqm::config_digest(config)},
       {"protocol", dqm::protocol_name(config.protocol)},
       {"harmonic_l", std::to_string(config.harmonic_l)},
       {"repetitions", std::to_string(config.repetitions)},
       {"omega_larmor_2pi_hz",
        dqm::format_full(system.larmor_frequency() / dqm::two_pi)}});
  std::cout << "wrote " << scan.omega_d.size() << " points to " << out_path << "\n";
  return exit_ok;
}

struct CompareArgs {
  std::string a;
  std::string b;
  std::string report_out;
  double prominence = 0.02;
  int workers = 0;
};

dqm::SpectrumScan load_scan_any(const std::string& path, int workers) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    const dqm::RunConfig config = dqm::load_run_config(path);
    const dqm::SpinSystem system = dqm::system_from_config(config);
    return dqm::scan_spectrum(system,
                              dqm::schedule_factory_from_config(config, system),
                              dqm::scan_grid_from_config(config),
                              dqm::options_from_config(config), workers);
  }
  return dqm::read_scan_csv(path);
}

int cmd_compare(const CompareArgs& args) {
  const dqm::SpectrumScan scan_a = load_scan_any(args.a, args.workers);
  const dqm::SpectrumScan scan_b = load_scan_any(args.b, args.workers);
  const dqm::CompareReport report =
      dqm::compare_scans(scan_a, scan_b, args.prominence);
  const dqm::Json j = dqm::compare_report_to_json(report);
  if (!args.report_out.empty()) {
    std::ofstream out(args.report_out);
    if (!out) throw dqm::Error("cannot open report file '" + args.report_out + "'");
    out << j.dump(2) << "\n";
  }
  std::cout << j.dump(2) << "\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double-quantum magnetometry simulator and waveform compiler"};
  app.require_subcommand(1);

  FlCoefArgs flcoef_args;
  CLI::App* flcoef = app.add_subcommand(
      "flcoef", "tabulate top-hat filter coefficients f_l(r)");
  flcoef->add_option("--l", flcoef_args.harmonics, "harmonics (odd)");
  flcoef->add_option("--r-min", flcoef_args.r_min, "first r value");
  flcoef->add_option("--r-max", flcoef_args.r_max, "last r value");
  flcoef->add_option("--r-step", flcoef_args.r_step, "r grid step");
  flcoef->add_option("--out", flcoef_args.out, "output CSV path");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "synthesize the corrected modulation and export Omega(t)");
  synth->add_option("--config", synth_args.config, "run config JSON")->required();
  synth->add_option("--waveform", synth_args.waveform_out, "waveform output path");
  synth->add_option("--report", synth_args.report_out, "JSON report path");
  synth->add_option("--dump-schedule", synth_args.schedule_out,
                    "write the resonant schedule as JSON");

  ScanArgs scan_args;
  CLI::App* scan = app.add_subcommand("scan", "drive-frequency spectrum scan");
  scan->add_option("--config", scan_args.config, "run config JSON")->required();
  scan->add_option("--out", scan_args.out, "output CSV path");
  scan->add_option("--dump-schedule", scan_args.schedule_out,
                   "write the resonant schedule as JSON");
  scan->add_option("--workers", scan_args.workers,
                   "worker threads (default: DQMAG_WORKERS or hardware)");

  CompareArgs compare_args;
  CLI::App* compare =
      app.add_subcommand("compare", "align two scans and compare their peaks");
  compare->add_option("--a", compare_args.a, "scan CSV or config JSON")->required();
  compare->add_option("--b", compare_args.b, "scan CSV or config JSON")->required();
  compare->add_option("--report", compare_args.report_out, "JSON report path");
  compare->add_option("--prominence", compare_args.prominence,
                      "dip prominence threshold");
  compare->add_option("--workers", compare_args.workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (flcoef->parsed()) return cmd_flcoef(flcoef_args);
    if (synth->parsed()) return cmd_synth(synth_args);
    if (scan->parsed()) return cmd_scan(scan_args);
    if (compare->parsed()) return cmd_compare(compare_args);
  } catch (const dqm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const dqm::GeometryError& e) {
    std::cerr << "synthesis error: " << e.what() << "\n";
    return exit_synthesis;
  } catch (const dqm::DegenerateBasisError& e) {
    std::cerr << "synthesis error: " << e.what() << "\n";
    return exit_synthesis;
  } catch (const dqm::RangeViolationError& e) {
    std::cerr << "synthesis error: " << e.what() << "\n";
    return exit_synthesis;
  } catch (const dqm::AreaError& e) {
    std::cerr << "synthesis error: " << e.what() << "\n";
    return exit_synthesis;
  } catch (const dqm::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return exit_solver;
  } catch (const dqm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_ok;
}
