#include "excsim/gates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "excsim/units.hpp"

namespace excsim {

std::vector<double> interface_fidelity(const Trajectory& traj, const Polarization& psi_in) {
    std::vector<double> f(traj.rho.size());
    const Eigen::Vector2cd a = psi_in.amplitudes;
    for (std::size_t i = 0; i < traj.rho.size(); ++i) {
        const Eigen::Matrix2cd rho = renormalized_exciton_block(traj.rho[i]);
        f[i] = (a.adjoint() * rho * a)(0).real();
    }
    return f;
}

double gate_fidelity_state(const Polarization& psi_G, const Eigen::Matrix2cd& U_I,
                           const Polarization& psi_in, double f_in) {
    if (!(f_in > 0.0)) throw std::invalid_argument("gate_fidelity_state: f_in must be > 0");
    const complexd overlap = (psi_G.amplitudes.adjoint() * U_I * psi_in.amplitudes)(0);
    return std::norm(overlap) / f_in;
}

double gate_fidelity_dm(const Eigen::Matrix2cd& rho_G, const Eigen::Matrix2cd& U_I,
                        const Eigen::Matrix2cd& rho_X) {
    const double purity = (rho_X * rho_X).trace().real();
    if (!(purity > 0.0)) throw std::invalid_argument("gate_fidelity_dm: zero purity");
    return (rho_G * U_I * rho_X * U_I.adjoint()).trace().real() / purity;
}

Eigen::Matrix2cd ideal_phase_gate(double field, const DeviceParams& p, double phase) {
    const Eigen::Vector2d e0 = upper_eigenvector(field, p);
    const Eigen::Vector2d e1(-e0(1), e0(0));
    const Eigen::Matrix2d p0 = e0 * e0.transpose();
    const Eigen::Matrix2d p1 = e1 * e1.transpose();
    return p0.cast<complexd>() + std::polar(1.0, phase) * p1.cast<complexd>();
}

Eigen::Matrix2cd spin_flip_target() {
    Eigen::Matrix2cd u;
    u << 1.0, 0.0, 0.0, -1.0;
    return u;
}

double extract_phase(const TimeTrace& norm_trace_d, double s_base_ueV, double gate_center_ns,
                     double guard_ns, std::optional<double> hint) {
    const double omega = s_base_ueV / kHbar;
    std::vector<double> t_pre, y_pre, t_post, y_post;
    for (std::size_t i = 0; i < norm_trace_d.size(); ++i) {
        if (!norm_trace_d.valid[i]) continue;
        const double t = norm_trace_d.bin_center(i);
        if (t < gate_center_ns - guard_ns) {
            t_pre.push_back(t);
            y_pre.push_back(norm_trace_d.value[i]);
        } else if (t > gate_center_ns + guard_ns) {
            t_post.push_back(t);
            y_post.push_back(norm_trace_d.value[i]);
        }
    }
    const double period = 2.0 * M_PI / omega;
    const auto span = [](const std::vector<double>& t) {
        return t.empty() ? 0.0 : t.back() - t.front();
    };
    if (span(t_pre) < 2.0 * period || span(t_post) < 2.0 * period)
        throw FitError("extract_phase: insufficient periods");

    const auto pre = fit_fixed_freq_cosine(t_pre, y_pre, omega);
    const auto post = fit_fixed_freq_cosine(t_post, y_post, omega);
    double dphi = post.phase - pre.phase;
    dphi = std::remainder(dphi, 2.0 * M_PI);
    if (dphi <= -M_PI) dphi += 2.0 * M_PI;
    if (hint) {
        dphi += 2.0 * M_PI * std::round((*hint - dphi) / (2.0 * M_PI));
    }
    return dphi;
}

double pulse_phase_gain(const PulseProfile& pulse, const DeviceParams& p, double t_end) {
    PulseProfile flat = pulse;
    flat.pulses.clear();
    flat.ringing.reset();
    return accumulated_phase(pulse, p, t_end) - accumulated_phase(flat, p, t_end);
}

PulseProfile calibrate_pulse(double target_phase, double width_fwhm, double baseline_field,
                             const DeviceParams& p, double center) {
    if (target_phase < 0.0)
        throw std::invalid_argument("calibrate_pulse: target phase must be >= 0");
    if (!(width_fwhm > 0.0)) throw std::invalid_argument("calibrate_pulse: fwhm must be > 0");
    if (center < 0.0) center = 0.25 + 0.5 * width_fwhm;

    PulseProfile pulse;
    pulse.baseline_field = baseline_field;
    pulse.pulses.push_back({0.0, center, width_fwhm});
    if (target_phase == 0.0) return pulse;

    // Excursion away from the anticrossing keeps the detuning sign fixed and
    // the phase gain monotone in the amplitude magnitude.
    const double delta_base = detuning(baseline_field, p);
    const double dir = (delta_base > 0.0) ? 1.0 : -1.0;
    const double t_end = center + 4.0 * width_fwhm;

    const auto gain = [&](double magnitude) {
        PulseProfile trial = pulse;
        trial.pulses[0].amplitude = dir * magnitude;
        return pulse_phase_gain(trial, p, t_end);
    };

    double lo = 0.0, hi = 1.0;
    const double max_magnitude = 400.0;
    while (gain(hi) < target_phase) {
        lo = hi;
        hi *= 2.0;
        if (hi > max_magnitude)
            throw std::runtime_error("calibrate_pulse: bracket failure, target phase unreachable");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = gain(mid);
        if (std::abs(g - target_phase) < 1e-8) {
            lo = hi = mid;
            break;
        }
        (g < target_phase ? lo : hi) = mid;
        if (hi - lo < 1e-12 * hi) break;
    }
    pulse.pulses[0].amplitude = dir * 0.5 * (lo + hi);
    return pulse;
}

namespace {

GateResult run_gate(const DeviceParams& p, const PulseProfile& pulse,
                    const Eigen::Matrix2cd& target, const Polarization& psi_in,
                    const NoiseChannels& noise, const DetectionModel& det, double t_end,
                    double step) {
    GateResult res;
    res.pulse = pulse;
    res.t = bin_centers(t_end, det.time_bin);

    PulseProfile flat = pulse;
    flat.pulses.clear();
    flat.ringing.reset();

    const Rho3 rho0 = encode_exciton(psi_in);
    const std::vector<PropagationJob> jobs{{rho0, pulse, noise}, {rho0, flat, noise}};
    auto trajs = propagate_batch(jobs, p, res.t, step);
    res.gated = std::move(trajs[0]);
    res.ungated = std::move(trajs[1]);

    res.extracted_phase = pulse_phase_gain(pulse, p, t_end);

    double settle = 0.0;
    for (const auto& g : pulse.pulses)
        settle = std::max(settle, g.center + 2.5 * g.fwhm);
    if (pulse.ringing) settle += 3.0 * pulse.ringing->damping_time;
    res.post_gate_time = settle;

    res.fidelity.resize(res.t.size());
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        const double f = gate_fidelity_dm(renormalized_exciton_block(res.gated.rho[i]), target,
                                          renormalized_exciton_block(res.ungated.rho[i]));
        if (f > 1.0 + 1e-9) res.any_clipped = true;
        res.fidelity[i] = std::clamp(f, 0.0, 1.0);
        if (res.t[i] >= settle && (i == 0 || res.t[i - 1] < settle))
            res.post_gate_fidelity = res.fidelity[i];
    }
    return res;
}

} // namespace

GateResult run_phase_gate(const DeviceParams& p, const PulseProfile& pulse, double target_phase,
                          const NoiseChannels& noise, const DetectionModel& det, double t_end,
                          double step) {
    const Eigen::Matrix2cd target = ideal_phase_gate(pulse.baseline_field, p, target_phase);
    return run_gate(p, pulse, target, pol::D(), noise, det, t_end, step);
}

GateResult run_spin_flip(const DeviceParams& p, const PulseProfile& pulse,
                         const NoiseChannels& noise, const DetectionModel& det, double t_end,
                         double step) {
    if (std::abs(pulse.baseline_field - p.F0) > 1e-6)
        throw std::invalid_argument("run_spin_flip: baseline must sit at the anticrossing");
    return run_gate(p, pulse, spin_flip_target(), pol::D(), noise, det, t_end, step);
}

} // namespace excsim
