#include "dqm/operators.hpp"

#include <cmath>
#include <complex>

#include "dqm/errors.hpp"

using namespace Eigen;

namespace dqm {

namespace {
constexpr std::complex<double> im{0.0, 1.0};

int level_index(int m) {
  switch (m) {
    case +1: return 0;
    case 0: return 1;
    case -1: return 2;
  }
  throw ConfigError("NV level must be one of {+1, 0, -1}");
}

Matrix2cd pauli_x() { return (Matrix2cd() << 0, 1, 1, 0).finished(); }
Matrix2cd pauli_y() { return (Matrix2cd() << 0, -im, im, 0).finished(); }
Matrix2cd pauli_z() { return (Matrix2cd() << 1, 0, 0, -1).finished(); }

// (v . sigma)/2 for a lab-frame direction v
Matrix2cd spin_half_along(const Vector3d& v) {
  return 0.5 * (v.x() * pauli_x() + v.y() * pauli_y() + v.z() * pauli_z());
}

// sum_j A_j . I_j on the nuclear register alone (dim 2^N)
OperatorMatrix nuclear_hyperfine_sum(const SpinSystem& system) {
  const int n = system.nucleus_count();
  const int d = 1 << n;
  OperatorMatrix total = OperatorMatrix::Zero(d, d);
  for (int j = 0; j < n; ++j) {
    const auto& h = system.nuclei[j];
    Matrix2cd op = h.az * 0.5 * pauli_z();
    if (h.transverse_defined) op += h.ax * spin_half_along(h.x_hat);
    OperatorMatrix embedded = OperatorMatrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
      embedded = kron(embedded, i == j ? OperatorMatrix(op)
                                       : OperatorMatrix(Matrix2cd::Identity()));
    }
    total += embedded;
  }
  return total;
}

// -omega_L sum_j I_j^z on the nuclear register alone
OperatorMatrix nuclear_zeeman_sum(const SpinSystem& system) {
  const int n = system.nucleus_count();
  const int d = 1 << n;
  const double omega_l = system.larmor_frequency();
  OperatorMatrix total = OperatorMatrix::Zero(d, d);
  for (int j = 0; j < n; ++j) {
    OperatorMatrix embedded = OperatorMatrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
      embedded = kron(embedded, i == j ? OperatorMatrix(0.5 * pauli_z())
                                       : OperatorMatrix(Matrix2cd::Identity()));
    }
    total -= omega_l * embedded;
  }
  return total;
}
}  // namespace

Matrix3cd spin1_sz() {
  return (Matrix3cd() << 1, 0, 0, 0, 0, 0, 0, 0, -1).finished();
}

Matrix3cd spin1_sx() {
  const double s = 1.0 / std::sqrt(2.0);
  return (Matrix3cd() << 0, s, 0, s, 0, s, 0, s, 0).finished();
}

Matrix3cd spin1_g() {
  return (Matrix3cd() << 1, 0, 0, 0, -2, 0, 0, 0, 1).finished();
}

Matrix3cd spin1_identity() { return Matrix3cd::Identity(); }

Matrix3cd sigma_tilde_x() {
  Matrix3cd m = Matrix3cd::Zero();
  m(0, 2) = 1.0;
  m(2, 0) = 1.0;
  return m;
}

Matrix3cd level_projector(int m) { return level_ket_bra(m, m); }

Matrix3cd level_ket_bra(int m, int m_prime) {
  Matrix3cd out = Matrix3cd::Zero();
  out(level_index(m), level_index(m_prime)) = 1.0;
  return out;
}

Matrix3cd drive_coupling(int transition, double phase) {
  if (transition != +1 && transition != -1) {
    throw ConfigError("drive transition must be +1 or -1");
  }
  Matrix3cd d = Matrix3cd::Zero();
  const int t = level_index(transition);
  const int zero = level_index(0);
  d(t, zero) = std::exp(-im * phase);
  d(zero, t) = std::exp(+im * phase);
  return d;
}

Matrix3cd pulse_unitary(int transition, double phase, double phi) {
  // SM closed form: 1 + (cos phi - 1)(|t><t| + |0><0|) - i sin phi D
  Matrix3cd u = Matrix3cd::Identity();
  const double c = std::cos(phi) - 1.0;
  u += c * (level_projector(transition) + level_projector(0));
  u -= im * std::sin(phi) * drive_coupling(transition, phase);
  return u;
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  OperatorMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

OperatorMatrix embed_nv(const Matrix3cd& op, int n_nuclei) {
  const int d = 1 << n_nuclei;
  return kron(op, OperatorMatrix::Identity(d, d));
}

OperatorMatrix embed_nucleus(const Matrix2cd& op, int index, int n_nuclei) {
  if (index < 0 || index >= n_nuclei) throw ConfigError("nucleus index out of range");
  OperatorMatrix out = OperatorMatrix::Identity(3, 3);
  for (int i = 0; i < n_nuclei; ++i) {
    out = kron(out, i == index ? OperatorMatrix(op)
                               : OperatorMatrix(Matrix2cd::Identity()));
  }
  return out;
}

double hermiticity_defect(const OperatorMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const OperatorMatrix& m) {
  const OperatorMatrix id = OperatorMatrix::Identity(m.rows(), m.cols());
  return (m.adjoint() * m - id).cwiseAbs().maxCoeff();
}

OperatorMatrix expm_hermitian(const OperatorMatrix& h, double t) {
  SelfAdjointEigenSolver<OperatorMatrix> solver(h);
  if (solver.info() != Success) throw SolverError("eigendecomposition failed");
  const VectorXd& evals = solver.eigenvalues();
  VectorXcd phases(evals.size());
  for (Index i = 0; i < evals.size(); ++i) {
    phases(i) = std::exp(-im * evals(i) * t);
  }
  return solver.eigenvectors() * phases.asDiagonal() *
         solver.eigenvectors().adjoint();
}

OperatorMatrix matrix_power(const OperatorMatrix& u, long long n) {
  if (n < 0) throw SolverError("matrix_power expects n >= 0");
  OperatorMatrix result = OperatorMatrix::Identity(u.rows(), u.cols());
  OperatorMatrix base = u;
  while (n > 0) {
    if (n & 1) result = (base * result).eval();
    base = (base * base).eval();
    n >>= 1;
  }
  return result;
}

OperatorMatrix nuclear_zeeman(const SpinSystem& system) {
  return kron(Matrix3cd::Identity(), nuclear_zeeman_sum(system));
}

OperatorMatrix hyperfine_coupling(const SpinSystem& system) {
  return kron(spin1_sz(), nuclear_hyperfine_sum(system));
}

OperatorMatrix free_hamiltonian(const SpinSystem& system) {
  return nuclear_zeeman(system) + hyperfine_coupling(system);
}

OperatorMatrix nv_detuning_operator(const SpinSystem& system) {
  const Matrix3cd p = level_projector(+1) + level_projector(-1);
  return embed_nv(p, system.nucleus_count());
}

OperatorMatrix rotating_frame_hamiltonian(const SpinSystem& system,
                                          const std::vector<DriveTone>& tones) {
  bool drives_plus = false;
  bool drives_minus = false;
  for (const auto& tone : tones) {
    if (tone.omega == 0.0) continue;
    (tone.transition == +1 ? drives_plus : drives_minus) = true;
  }
  if (drives_plus && drives_minus) {
    throw ConfigError("simultaneous drives on both NV transitions are not supported");
  }
  OperatorMatrix h = free_hamiltonian(system);
  for (const auto& tone : tones) {
    if (tone.omega == 0.0) continue;
    h += 0.5 * tone.omega *
         embed_nv(drive_coupling(tone.transition, tone.phase), system.nucleus_count());
  }
  return h;
}

OperatorMatrix sqm_qubit_operator(const Matrix2cd& op, int n_nuclei) {
  const int d = 1 << n_nuclei;
  return kron(op, OperatorMatrix::Identity(d, d));
}

OperatorMatrix sqm_effective_hamiltonian(const SpinSystem& system,
                                         bool include_gradient) {
  const OperatorMatrix zeeman = nuclear_zeeman_sum(system);
  const OperatorMatrix coupling = nuclear_hyperfine_sum(system);
  OperatorMatrix h = kron(Matrix2cd::Identity(), zeeman) +
                     kron(0.5 * pauli_z(), coupling);
  if (include_gradient) {
    h += kron(0.5 * Matrix2cd::Identity(), coupling);
  }
  return h;
}

OperatorMatrix sqm_detuning_operator(const SpinSystem& system) {
  Matrix2cd p = Matrix2cd::Zero();
  p(0, 0) = 1.0;  // |1><1| in the (|1>, |0>) basis
  return sqm_qubit_operator(p, system.nucleus_count());
}

}  // namespace dqm
