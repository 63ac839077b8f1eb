#include "excsim/device.hpp"

#include <cmath>
#include <stdexcept>

namespace excsim {

void DeviceParams::validate() const {
    if (!(s0 > 0.0)) throw std::invalid_argument("DeviceParams: s0 must be > 0");
    if (!(tau_r > 0.0)) throw std::invalid_argument("DeviceParams: tau_r must be > 0");
    if (!(T_cross > 0.0)) throw std::invalid_argument("DeviceParams: T_cross must be > 0");
    if (!(T_spin > 0.0)) throw std::invalid_argument("DeviceParams: T_spin must be > 0");
    if (!(d > 0.0)) throw std::invalid_argument("DeviceParams: d must be > 0");
    if (gradient_k == 0.0) throw std::invalid_argument("DeviceParams: gradient_k must be nonzero");
}

double bias_to_field(double bias_volts, const DeviceParams& p) {
    // V/nm -> kV/cm is a factor 1e4.
    return (bias_volts - p.V_bi) / p.d * 1.0e4;
}

double detuning(double field, const DeviceParams& p) {
    return p.gradient_k * (field - p.F0);
}

double splitting(double field, const DeviceParams& p) {
    return std::hypot(detuning(field, p), p.s0);
}

double eigenbasis_angle(double field, const DeviceParams& p) {
    const double chi = 0.5 * std::atan2(p.s0, detuning(field, p));
    return chi * 180.0 / M_PI;
}

SpinHamiltonian hamiltonian(double field, const DeviceParams& p) {
    const double delta = detuning(field, p);
    SpinHamiltonian h;
    h.matrix << 0.5 * delta, 0.5 * p.s0,
                0.5 * p.s0, -0.5 * delta;
    return h;
}

Eigen::Vector2d upper_eigenvector(double field, const DeviceParams& p) {
    const double chi = 0.5 * std::atan2(p.s0, detuning(field, p));
    return {std::cos(chi), std::sin(chi)};
}

} // namespace excsim
