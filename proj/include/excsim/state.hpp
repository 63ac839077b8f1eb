#pragma once

#include <complex>

#include <Eigen/Dense>

namespace excsim {

using complexd = std::complex<double>;

/// Normalized two-component amplitude vector (a_H, a_V). Doubles as a
/// Jones vector for photon polarization in the lab {H, V} basis.
struct QubitState {
    Eigen::Vector2cd amplitudes{1.0, 0.0};

    static QubitState from_angles(double theta, double phi) {
        QubitState q;
        q.amplitudes << std::cos(theta), std::polar(std::sin(theta), phi);
        return q;
    }

    double norm() const { return amplitudes.norm(); }
    QubitState normalized() const {
        QubitState q;
        q.amplitudes = amplitudes / amplitudes.norm();
        return q;
    }
};

using Polarization = QubitState;

namespace pol {
// Circular convention: R = (H - iV)/sqrt(2), L = (H + iV)/sqrt(2).
inline Polarization H() { return {{1.0, 0.0}}; }
inline Polarization V() { return {{0.0, 1.0}}; }
inline Polarization D() { return {{M_SQRT1_2, M_SQRT1_2}}; }
inline Polarization A() { return {{M_SQRT1_2, -M_SQRT1_2}}; }
inline Polarization R() { return {{M_SQRT1_2, complexd(0.0, -M_SQRT1_2)}}; }
inline Polarization L() { return {{M_SQRT1_2, complexd(0.0, M_SQRT1_2)}}; }
} // namespace pol

/// 3x3 density matrix over the ordered basis {|g>, |H>, |V>}.
using Rho3 = Eigen::Matrix3cd;

inline Eigen::Matrix2cd exciton_block(const Rho3& rho) {
    return rho.block<2, 2>(1, 1);
}

inline double exciton_population(const Rho3& rho) {
    return rho(1, 1).real() + rho(2, 2).real();
}

/// Exciton-subspace block renormalized to unit trace.
/// Throws std::runtime_error if the exciton population vanishes.
Eigen::Matrix2cd renormalized_exciton_block(const Rho3& rho);

/// Checks Hermiticity (1e-10), unit trace (1e-10) and positivity
/// (eigenvalues >= -1e-10). Returns true when all hold.
bool is_physical_density(const Rho3& rho, double tol = 1e-10);

/// Bloch vector of a 2x2 exciton/polarization density matrix, components
/// ordered (D/A, R/L, H/V).
Eigen::Vector3d bloch_vector(const Eigen::Matrix2cd& rho);

/// Inverse of bloch_vector.
Eigen::Matrix2cd density_from_bloch(const Eigen::Vector3d& r);

} // namespace excsim
