#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dqm/spin_system.hpp"

namespace dqm {

using OperatorMatrix = Eigen::MatrixXcd;

// ---------------------------------------------------------------------------
// NV spin-1 operators, ordered basis (|+1>, |0>, |-1>)
// ---------------------------------------------------------------------------

Eigen::Matrix3cd spin1_sz();        // |1><1| - |-1><-1|
Eigen::Matrix3cd spin1_sx();
Eigen::Matrix3cd spin1_g();         // |1><1| - 2|0><0| + |-1><-1|
Eigen::Matrix3cd spin1_identity();
Eigen::Matrix3cd sigma_tilde_x();   // |1><-1| + |-1><1|
Eigen::Matrix3cd level_projector(int m);             // m in {+1, 0, -1}
Eigen::Matrix3cd level_ket_bra(int m, int m_prime);  // |m><m'|

// drive coupling e^{-i phase}|t><0| + e^{+i phase}|0><t| on transition t = ±1
Eigen::Matrix3cd drive_coupling(int transition, double phase);

// closed-form pulse propagator exp[-i phi (e^{-i phase}|t><0| + h.c.)]
Eigen::Matrix3cd pulse_unitary(int transition, double phase, double phi);

// ---------------------------------------------------------------------------
// Tensor-product helpers
// ---------------------------------------------------------------------------

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix embed_nv(const Eigen::Matrix3cd& op, int n_nuclei);
OperatorMatrix embed_nucleus(const Eigen::Matrix2cd& op, int index, int n_nuclei);

double hermiticity_defect(const OperatorMatrix& m);  // max |M - M^dag|
double unitarity_defect(const OperatorMatrix& m);    // max |M^dag M - 1|

// exp(-i t H) for Hermitian H, via eigendecomposition (unitary to roundoff)
OperatorMatrix expm_hermitian(const OperatorMatrix& h, double t);

// U^n by binary exponentiation
OperatorMatrix matrix_power(const OperatorMatrix& u, long long n);

// ---------------------------------------------------------------------------
// Hamiltonian assembly in the rotating frame
// ---------------------------------------------------------------------------

struct DriveTone {
  int transition = +1;  // which |0> <-> |±1> transition is driven
  double phase = 0.0;
  double omega = 0.0;   // Rabi frequency, rad/s (signed)
};

// -sum_j gamma_n Bz I_j^z, with identity on the NV
OperatorMatrix nuclear_zeeman(const SpinSystem& system);

// S_z (x) sum_j A_j . I_j, nuclear operators in each hyperfine frame
OperatorMatrix hyperfine_coupling(const SpinSystem& system);

// drive-free part of the simulation-frame Hamiltonian
OperatorMatrix free_hamiltonian(const SpinSystem& system);

// (|1><1| + |-1><-1|) (x) 1, multiplied by a detuning error when present
OperatorMatrix nv_detuning_operator(const SpinSystem& system);

// full rotating-frame Hamiltonian; rejects tones driving both transitions
OperatorMatrix rotating_frame_hamiltonian(const SpinSystem& system,
                                          const std::vector<DriveTone>& tones);

// ---------------------------------------------------------------------------
// SQM qubit reduction, ordered basis (|1>, |0>)
// ---------------------------------------------------------------------------

// static SQM Hamiltonian: nuclear Zeeman + (sigma_z/2) coupling, plus the
// NV-induced gradient term (1/2) sum_j A_j . I_j unless disabled
OperatorMatrix sqm_effective_hamiltonian(const SpinSystem& system,
                                         bool include_gradient = true);

OperatorMatrix sqm_qubit_operator(const Eigen::Matrix2cd& op, int n_nuclei);

// |1><1| (x) 1 on the qubit system (detuning error target)
OperatorMatrix sqm_detuning_operator(const SpinSystem& system);

}  // namespace dqm
