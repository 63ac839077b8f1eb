#pragma once

#include <Eigen/Dense>

namespace excsim {

/// Physical constants of the dot and diode. Defaults are the measured
/// values for the device this model was calibrated against.
struct DeviceParams {
    double gradient_k = 0.26;  // splitting gradient, ueV per kV/cm
    double F0 = -155.4;        // anticrossing field, kV/cm
    double s0 = 0.4;           // minimum splitting, ueV
    double V_bi = 2.2;         // built-in potential, V
    double d = 140.0;          // intrinsic region thickness, nm
    double tau_r = 1.28;       // radiative lifetime, ns
    double T_cross = 3.0;      // cross-dephasing time, ns
    double T_spin = 78.0;      // spin scattering time, ns

    /// Throws std::invalid_argument if any constraint is violated.
    void validate() const;
};

/// 2x2 Hermitian, traceless energy matrix in the fixed lab basis {|H>, |V>}.
struct SpinHamiltonian {
    Eigen::Matrix2cd matrix; // ueV
};

/// F = (V - V_bi)/d, bias in volts, thickness in nm, result in kV/cm.
double bias_to_field(double bias_volts, const DeviceParams& p);

/// Linear detuning delta(F) = k * (F - F0), in ueV.
double detuning(double field, const DeviceParams& p);

/// |s|(F) = sqrt(delta^2 + s0^2), in ueV. Minimum s0 at F0.
double splitting(double field, const DeviceParams& p);

/// Lab-frame orientation of the upper eigenstate, in degrees.
/// chi = atan2(s0, delta) / 2; sweeps 90 degrees across the anticrossing.
double eigenbasis_angle(double field, const DeviceParams& p);

/// H(F) = 1/2 [[delta, s0], [s0, -delta]] in the lab {H, V} basis.
SpinHamiltonian hamiltonian(double field, const DeviceParams& p);

/// Real unit eigenvector of hamiltonian(F) with eigenvalue +splitting/2,
/// i.e. (cos chi, sin chi).
Eigen::Vector2d upper_eigenvector(double field, const DeviceParams& p);

} // namespace excsim
