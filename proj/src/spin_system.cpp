#include "dqm/spin_system.hpp"

#include <cmath>

#include "dqm/errors.hpp"

namespace dqm {

void PhysicalConstants::validate() const {
  if (!(zero_field_splitting > 0.0) || !(gamma_e > 0.0) || !(gamma_n > 0.0)) {
    throw ConfigError("physical constants must be strictly positive");
  }
}

HyperfineVector hyperfine_frame(const Eigen::Vector3d& a_vec) {
  if (!a_vec.allFinite()) {
    throw ConfigError("hyperfine vector must be finite");
  }
  HyperfineVector h;
  h.a_vec = a_vec;
  h.az = a_vec.z();
  const Eigen::Vector3d z_hat = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d transverse = a_vec - h.az * z_hat;
  h.ax = transverse.norm();
  h.ay = z_hat.cross(a_vec).norm();  // equals ax
  if (h.ax > 0.0) {
    h.x_hat = transverse / h.ax;
    h.y_hat = z_hat.cross(a_vec) / h.ay;
    h.transverse_defined = true;
  }
  return h;
}

void SpinSystem::validate() const {
  constants.validate();
  if (!(bz > 0.0)) throw ConfigError("static field bz must be positive");
  if (nuclei.size() > 20) throw ConfigError("nuclear cluster too large");
}

}  // namespace dqm
