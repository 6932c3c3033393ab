#pragma once

#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace dqm {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// All frequencies in this library are angular (rad/s); values quoted in Hz
// pick up their 2*pi factor strictly at I/O boundaries.
struct PhysicalConstants {
  double zero_field_splitting = two_pi * 2.87e9;  // D
  double gamma_e = two_pi * 28.024e9;             // |gamma_e| per tesla
  double gamma_n = two_pi * 42.577e6;             // 1H default, per tesla

  void validate() const;
};

// Hyperfine vector decomposed against the NV axis (z): A = ax*x_hat + az*z.
// The transverse frame (x_hat, y_hat) is the one the coupling constants are
// quoted in; it is undefined for purely axial vectors.
struct HyperfineVector {
  Eigen::Vector3d a_vec = Eigen::Vector3d::Zero();  // rad/s
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
  Eigen::Vector3d x_hat = Eigen::Vector3d::Zero();
  Eigen::Vector3d y_hat = Eigen::Vector3d::Zero();
  bool transverse_defined = false;
};

// split a hyperfine vector into axial and transverse parts
HyperfineVector hyperfine_frame(const Eigen::Vector3d& a_vec);

// NV + nuclear spin cluster. Immutable after construction.
struct SpinSystem {
  PhysicalConstants constants;
  double bz = 0.0;  // tesla
  std::vector<HyperfineVector> nuclei;

  int nucleus_count() const { return static_cast<int>(nuclei.size()); }
  int dim() const { return 3 << nuclei.size(); }
  int sqm_dim() const { return 2 << nuclei.size(); }
  double larmor_frequency() const { return constants.gamma_n * bz; }
  double larmor_period() const { return two_pi / larmor_frequency(); }

  void validate() const;
};

}  // namespace dqm
