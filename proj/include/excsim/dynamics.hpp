#pragma once

#include <span>
#include <vector>

#include "excsim/device.hpp"
#include "excsim/pulse.hpp"
#include "excsim/state.hpp"

namespace excsim {

struct NoiseChannels {
    double radiative_rate = 0.0; // 1/ns, per exciton eigenstate
    double dephasing_rate = 0.0; // 1/ns, eigenbasis coherence decay rate
    double spin_flip_rate = 0.0; // 1/ns, per direction

    static NoiseChannels none() { return {}; }
};

/// Rates from the device timescales: 1/tau_r, 1/T_cross, 1/(2 T_spin).
NoiseChannels build_noise(const DeviceParams& p);

/// Closed-form free evolution: phase exp(i s t / hbar) on the second
/// component relative to the first, in the eigenbasis with splitting s.
QubitState free_evolve(const QubitState& state, double s_ueV, double t_ns);

/// exp(-i H(F) t / hbar) for the constant-field two-level Hamiltonian.
Eigen::Matrix2cd exact_propagator(double field, const DeviceParams& p, double t_ns);

struct Trajectory {
    std::vector<double> t;   // ns
    std::vector<Rho3> rho;
};

/// Master-equation propagation under H(F(t)) with radiative decay to |g>,
/// pure dephasing in the instantaneous eigenbasis, and spin flips between
/// the instantaneous eigenstates. Fixed-step RK4, default step 1 ps.
/// The initial state is taken at t = 0; t_grid must be strictly increasing
/// and non-negative.
Trajectory propagate(const Rho3& rho0, const PulseProfile& pulse, const DeviceParams& p,
                     const NoiseChannels& noise, std::span<const double> t_grid,
                     double step = 1e-3);

/// Quadrature of splitting(F(tau))/hbar over [0, t], adaptive Simpson.
double accumulated_phase(const PulseProfile& pulse, const DeviceParams& p, double t_ns,
                         double rel_tol = 1e-10);

struct PropagationJob {
    Rho3 rho0;
    PulseProfile pulse;
    NoiseChannels noise;
};

/// Independent trajectories, OpenMP-parallel over jobs. Results are ordered
/// by job index and bitwise identical to the serial reference.
std::vector<Trajectory> propagate_batch(std::span<const PropagationJob> jobs,
                                        const DeviceParams& p, std::span<const double> t_grid,
                                        double step = 1e-3, int workers = 0);

/// Serial reference for propagate_batch.
std::vector<Trajectory> propagate_batch_serial(std::span<const PropagationJob> jobs,
                                               const DeviceParams& p,
                                               std::span<const double> t_grid,
                                               double step = 1e-3);

/// Uniform grid of bin centers: (i + 1/2) * bin, i = 0 .. n-1.
std::vector<double> bin_centers(double t_end, double bin);

} // namespace excsim
