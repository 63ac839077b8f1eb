#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "excsim/device.hpp"
#include "excsim/dynamics.hpp"
#include "excsim/pulse.hpp"
#include "excsim/state.hpp"

namespace excsim {

/// Uniformly binned, polarization-analyzed detection record. Values are
/// intensities (arbitrary units) or counts when Poisson sampling is on.
struct TimeTrace {
    double t_start = 0.0;   // ns, left edge of the first bin
    double bin_width = 0.0; // ns
    std::string channel;
    std::vector<double> value;
    std::vector<std::uint8_t> valid; // 0 marks bins without a defined value

    std::size_t size() const { return value.size(); }
    double bin_center(std::size_t i) const { return t_start + (i + 0.5) * bin_width; }
};

struct DetectionModel {
    double irf_sigma = 0.120;         // ns, detector response
    double init_jitter_sigma = 0.039; // ns, initialization time uncertainty
    double stark_window_sigma = 6.0;  // kV/cm; 0 disables the window
    double reference_field = -175.0;  // kV/cm, center of the detection window
    double photon_budget = 0.0;       // expected total counts when sampling
    bool poisson_enabled = false;
    double time_bin = 0.025;          // ns
};

/// Pure exciton density matrix with lab-basis amplitudes equal to the
/// Jones components of the input photon; ground population zero.
Rho3 encode_exciton(const Polarization& pol_in);

/// I_p(t) = (1/tau_r) <p|rho(t)|p> on the exciton subspace, sampled at the
/// trajectory times (which must be uniform bin centers).
TimeTrace emission_intensity(const Trajectory& traj, const Polarization& analyzer,
                             const DeviceParams& p);

/// Gaussian IRF+jitter convolution, Stark detection window, optional
/// Poisson sampling scaled to the photon budget. Deterministic per seed.
TimeTrace apply_detection(const TimeTrace& trace, const DetectionModel& det,
                          const PulseProfile& field, std::uint64_t seed = 0);

/// Per-bin value_p / (value_p + value_pbar); zero-denominator bins are
/// flagged invalid.
TimeTrace normalize_pair(const TimeTrace& trace_p, const TimeTrace& trace_pbar);

/// Per-bin Bloch vector (D/A, R/L, H/V components) from the three
/// normalized basis traces.
std::vector<Eigen::Vector3d> bloch_from_traces(const TimeTrace& norm_hv,
                                               const TimeTrace& norm_da,
                                               const TimeTrace& norm_rl);

} // namespace excsim
