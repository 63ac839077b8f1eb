#pragma once

#include <optional>
#include <vector>

#include "excsim/device.hpp"
#include "excsim/dynamics.hpp"
#include "excsim/fitting.hpp"
#include "excsim/photonics.hpp"
#include "excsim/pulse.hpp"

namespace excsim {

struct GateResult {
    PulseProfile pulse;
    std::vector<double> t;        // ns
    std::vector<double> fidelity; // clipped into [0, 1]
    bool any_clipped = false;
    double extracted_phase = 0.0; // radians, model-side accumulated phase
    double post_gate_time = 0.0;  // ns, first time the field is back at baseline
    double post_gate_fidelity = 0.0;
    Trajectory gated;
    Trajectory ungated;
};

/// <psi_in| rho~(t) |psi_in> on the renormalized exciton subspace.
std::vector<double> interface_fidelity(const Trajectory& traj, const Polarization& psi_in);

/// |<psi_G| U_I |psi_in>|^2 / f_in.
double gate_fidelity_state(const Polarization& psi_G, const Eigen::Matrix2cd& U_I,
                           const Polarization& psi_in, double f_in);

/// Tr[rho_G U_I rho_X U_I^dag] / Tr[rho_X^2], both matrices on the
/// renormalized exciton subspace.
double gate_fidelity_dm(const Eigen::Matrix2cd& rho_G, const Eigen::Matrix2cd& U_I,
                        const Eigen::Matrix2cd& rho_X);

/// Ideal gate that adds `phase` to the lower eigenstate at the given field.
Eigen::Matrix2cd ideal_phase_gate(double field, const DeviceParams& p, double phase);

/// Ideal spin flip: D <-> A exchange, sigma_z in the lab {H, V} basis.
Eigen::Matrix2cd spin_flip_target();

/// Phase step across the gate from separate fixed-frequency cosine fits of
/// the pre- and post-gate segments of a normalized D trace. Wrapped to
/// (-pi, pi]; an accumulated-phase hint resolves the 2 pi ambiguity.
double extract_phase(const TimeTrace& norm_trace_d, double s_base_ueV, double gate_center_ns,
                     double guard_ns = 1.0, std::optional<double> hint = std::nullopt);

/// Extra accumulated phase contributed by the pulse train of `pulse`
/// relative to its constant baseline, over [0, t_end].
double pulse_phase_gain(const PulseProfile& pulse, const DeviceParams& p, double t_end);

/// Solves for the signed pulse amplitude giving the target extra phase.
/// The excursion direction is chosen away from the anticrossing.
PulseProfile calibrate_pulse(double target_phase, double width_fwhm, double baseline_field,
                             const DeviceParams& p, double center = -1.0);

/// Phase-shift gate experiment on a D-polarized input at the pulse baseline.
GateResult run_phase_gate(const DeviceParams& p, const PulseProfile& pulse, double target_phase,
                          const NoiseChannels& noise, const DetectionModel& det,
                          double t_end = 12.0, double step = 1e-3);

/// Spin-flip experiment: D eigenstate prepared at the anticrossing, pulse
/// calibrated to a pi phase at elevated splitting.
GateResult run_spin_flip(const DeviceParams& p, const PulseProfile& pulse,
                         const NoiseChannels& noise, const DetectionModel& det,
                         double t_end = 6.0, double step = 1e-3);

} // namespace excsim
