#include <doctest.h>

#include <cmath>
#include <random>

#include "excsim/gates.hpp"
#include "excsim/photonics.hpp"
#include "excsim/units.hpp"

using namespace excsim;

namespace {

const DeviceParams dev{};

DetectionModel raw_detection() {
    DetectionModel det;
    det.irf_sigma = 0.0;
    det.init_jitter_sigma = 0.0;
    det.stark_window_sigma = 0.0;
    det.poisson_enabled = false;
    return det;
}

Eigen::Matrix2cd pure(const Polarization& p) {
    return p.amplitudes * p.amplitudes.adjoint();
}

/// Independent fixed-step Simpson quadrature of the extra phase of a pulse
/// over its constant baseline (oracle for calibrate_pulse/pulse_phase_gain).
double simpson_gain(const PulseProfile& pulse, double t_end, int n = 200001) {
    const double h = t_end / (n - 1);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = i * h;
        const double f = splitting(pulse.field_at(t), dev) -
                         splitting(pulse.baseline_field, dev);
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f;
    }
    return acc * h / 3.0 / kHbar;
}

} // namespace

TEST_CASE("gate_fidelity_state reference points") {
    const auto id = Eigen::Matrix2cd::Identity();
    CHECK(gate_fidelity_state(pol::D(), id, pol::D(), 1.0) == doctest::Approx(1.0));

    // pi phase gate takes D to A; perfect execution scores 1.
    const Eigen::Matrix2cd u_pi = spin_flip_target();
    CHECK(gate_fidelity_state(pol::A(), u_pi, pol::D(), 1.0) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // A gate delivering pi/2 instead of pi leaves the state at R: score 1/2.
    CHECK(gate_fidelity_state(pol::R(), u_pi, pol::D(), 1.0) ==
          doctest::Approx(0.5).epsilon(1e-12));

    // Interface factor rescales.
    CHECK(gate_fidelity_state(pol::A(), u_pi, pol::D(), 0.81) ==
          doctest::Approx(1.0 / 0.81).epsilon(1e-12));
}

TEST_CASE("gate_fidelity_dm agrees with the pure-state formula") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Eigen::Matrix2cd u_pi = spin_flip_target();
    for (int i = 0; i < 1000; ++i) {
        const auto in = QubitState::from_angles(u(rng) * M_PI, u(rng) * 2.0 * M_PI);
        const auto out = QubitState::from_angles(u(rng) * M_PI, u(rng) * 2.0 * M_PI);
        const double f_state = gate_fidelity_state(out, u_pi, in, 1.0);
        const double f_dm = gate_fidelity_dm(pure(out), u_pi, pure(in));
        CHECK(f_dm == doctest::Approx(f_state).epsilon(1e-10));
    }
    CHECK(gate_fidelity_dm(pure(pol::A()), u_pi, pure(pol::D())) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(gate_fidelity_dm(pure(pol::A()), u_pi, Eigen::Matrix2cd::Zero()),
                    std::invalid_argument);
}

TEST_CASE("interface_fidelity: eigenstate input stays at 1 under decay") {
    const Eigen::Vector2d e = upper_eigenvector(-175.0, dev);
    Polarization up{{e(0), e(1)}};
    PulseProfile flat;
    flat.baseline_field = -175.0;
    NoiseChannels noise;
    noise.radiative_rate = 1.0 / dev.tau_r;
    noise.dephasing_rate = 1.0 / dev.T_cross;
    const auto tg = bin_centers(10.0, 0.1);
    const auto traj = propagate(encode_exciton(up), flat, dev, noise, tg);
    for (double f : interface_fidelity(traj, up)) CHECK(f == doctest::Approx(1.0).epsilon(1e-9));

    // Vacuum has no exciton population to renormalize.
    Trajectory vac;
    vac.t = {0.0};
    Rho3 g = Rho3::Zero();
    g(0, 0) = 1.0;
    vac.rho = {g};
    CHECK_THROWS_AS(interface_fidelity(vac, up), std::runtime_error);
}

TEST_CASE("ideal_phase_gate is diagonal in the field eigenbasis") {
    const double f = -175.0;
    const Eigen::Vector2cd e0 = upper_eigenvector(f, dev).cast<complexd>();
    const Eigen::Vector2cd e1 = (Eigen::Vector2cd() << -e0(1), e0(0)).finished();
    for (double phase : {0.3, M_PI / 2.0, M_PI, 2.0}) {
        const Eigen::Matrix2cd u = ideal_phase_gate(f, dev, phase);
        CHECK((u * u.adjoint() - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
        CHECK((u * e0 - e0).norm() < 1e-12);
        CHECK((u * e1 - std::polar(1.0, phase) * e1).norm() < 1e-12);
    }
}

TEST_CASE("spin_flip_target exchanges D and A") {
    const Eigen::Matrix2cd u = spin_flip_target();
    CHECK((u - (Eigen::Matrix2cd() << 1, 0, 0, -1).finished()).norm() < 1e-14);
    const Eigen::Vector2cd out = u * pol::D().amplitudes;
    CHECK((out - pol::A().amplitudes).norm() < 1e-14);
}

TEST_CASE("pulse_phase_gain matches the Simpson oracle and is odd in amplitude") {
    const double baseline = dev.F0 - 20.0 / dev.gradient_k; // far detuned
    for (double a : {2.0, -2.0, 10.0}) {
        PulseProfile pulse;
        pulse.baseline_field = baseline;
        pulse.pulses.push_back({a, 2.0, 0.5});
        const double gain = pulse_phase_gain(pulse, dev, 5.0);
        CHECK(gain == doctest::Approx(simpson_gain(pulse, 5.0)).epsilon(1e-8));
    }

    PulseProfile plus, minus;
    plus.baseline_field = minus.baseline_field = baseline;
    plus.pulses.push_back({2.0, 2.0, 0.5});
    minus.pulses.push_back({-2.0, 2.0, 0.5});
    const double gp = pulse_phase_gain(plus, dev, 5.0);
    const double gm = pulse_phase_gain(minus, dev, 5.0);
    CHECK(gp == doctest::Approx(-gm).epsilon(1e-3));

    // Mirror baselines about the anticrossing give identical gains for
    // mirrored amplitudes.
    PulseProfile mirror;
    mirror.baseline_field = 2.0 * dev.F0 - baseline;
    mirror.pulses.push_back({2.0, 2.0, 0.5});
    CHECK(pulse_phase_gain(mirror, dev, 5.0) == doctest::Approx(gm).epsilon(1e-10));
}

TEST_CASE("calibrate_pulse: zero target, pi target, scaling") {
    const auto zero = calibrate_pulse(0.0, 0.389, -175.0, dev, 2.0);
    REQUIRE(zero.pulses.size() == 1);
    CHECK(std::fabs(zero.pulses[0].amplitude) < 1e-6);

    const auto pi_pulse = calibrate_pulse(M_PI, 0.389, -175.0, dev, 2.0);
    const double a_pi = pi_pulse.pulses[0].amplitude;
    // Excursion away from the anticrossing (more negative field).
    CHECK(a_pi < 0.0);
    CHECK(std::fabs(a_pi) == doctest::Approx(19.24).epsilon(0.01));
    CHECK(simpson_gain(pi_pulse, 6.0) == doctest::Approx(M_PI).epsilon(1e-6));

    // Splitting is pushed from ~5 to ~10 ueV at the pulse peak.
    const double s_peak = splitting(pi_pulse.field_at(2.0), dev);
    CHECK(s_peak == doctest::Approx(10.1).epsilon(0.05));

    // Near-linear amplitude-to-phase response at this detuning.
    const auto two_pi = calibrate_pulse(2.0 * M_PI, 0.389, -175.0, dev, 2.0);
    CHECK(std::fabs(two_pi.pulses[0].amplitude / a_pi) == doctest::Approx(2.0).epsilon(0.05));

    // The eigenbasis barely tilts at the pulse peak: quasi-static gate.
    const double dchi = std::fabs(eigenbasis_angle(pi_pulse.field_at(2.0), dev) -
                                  eigenbasis_angle(-175.0, dev));
    CHECK(dchi < 2.0);
}

namespace {

/// Normalized D trace of a noise-free D-input run under the given pulse.
TimeTrace norm_d_trace(const PulseProfile& pulse, double t_end) {
    const auto tg = bin_centers(t_end, 0.025);
    const auto traj =
        propagate(encode_exciton(pol::D()), pulse, dev, NoiseChannels::none(), tg);
    return normalize_pair(emission_intensity(traj, pol::D(), dev),
                          emission_intensity(traj, pol::A(), dev));
}

} // namespace

TEST_CASE("extract_phase: flat field reads zero, pi pulse reads pi") {
    PulseProfile flat;
    flat.baseline_field = -175.0;
    flat.pulses.push_back({0.0, 6.0, 0.389});
    const double s_base = splitting(-175.0, dev);
    CHECK(std::fabs(extract_phase(norm_d_trace(flat, 12.0), s_base, 6.0)) < 0.02);

    const auto pi_pulse = calibrate_pulse(M_PI, 0.389, -175.0, dev, 6.0);
    const double hint = pulse_phase_gain(pi_pulse, dev, 12.0);
    const double phi = extract_phase(norm_d_trace(pi_pulse, 12.0), s_base, 6.0, 1.0, hint);
    CHECK(std::fabs(phi - M_PI) < 0.05);

    // Too little data before the gate for a two-period fit.
    CHECK_THROWS_AS(extract_phase(norm_d_trace(pi_pulse, 12.0), s_base, 1.0), FitError);
}

TEST_CASE("pi phase gate runs clean noise-free") {
    const auto pi_pulse = calibrate_pulse(M_PI, 0.389, -175.0, dev, 6.0);
    const auto r =
        run_phase_gate(dev, pi_pulse, M_PI, NoiseChannels::none(), raw_detection(), 12.0);
    CHECK(std::fabs(r.extracted_phase - M_PI) < 1e-6);
    CHECK(r.post_gate_fidelity >= 0.99);
    CHECK(!r.any_clipped);
    for (double f : r.fidelity) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
    CHECK(r.post_gate_time > 6.0);
}

TEST_CASE("intermediate phase targets round-trip through the full pipeline") {
    const double s_base = splitting(-175.0, dev);
    for (double target : {M_PI / 4.0, M_PI / 2.0, 3.0 * M_PI / 2.0}) {
        const auto pulse = calibrate_pulse(target, 0.389, -175.0, dev, 6.0);
        const double hint = pulse_phase_gain(pulse, dev, 12.0);
        const double phi = extract_phase(norm_d_trace(pulse, 12.0), s_base, 6.0, 1.0, hint);
        CHECK(std::fabs(phi - target) < 0.05);
    }
}

TEST_CASE("zero-amplitude gate scores near zero against the pi target") {
    PulseProfile flat;
    flat.baseline_field = -175.0;
    const auto r = run_phase_gate(dev, flat, M_PI, NoiseChannels::none(), raw_detection(), 12.0);
    CHECK(r.post_gate_fidelity < 0.05);
}

namespace {

/// The spin flip reuses the phase-gate pulse (pi phase at the pulsed
/// splitting, calibrated at the detuned working point) with the baseline
/// moved onto the anticrossing.
PulseProfile flip_pulse(double fwhm) {
    PulseProfile p = calibrate_pulse(M_PI, fwhm, -175.0, dev);
    p.baseline_field = dev.F0;
    return p;
}

} // namespace

TEST_CASE("spin flip at the anticrossing: sudden works, adiabatic fails") {
    NoiseChannels none = NoiseChannels::none();
    const auto det = raw_detection();

    const auto rf = run_spin_flip(dev, flip_pulse(0.15), none, det, 6.0);
    CHECK(rf.post_gate_fidelity >= 0.95);

    const auto rm = run_spin_flip(dev, flip_pulse(1.0), none, det, 8.0);

    const auto rs = run_spin_flip(dev, flip_pulse(3.0), none, det, 20.0);

    // A ramp slower than hbar/s0 (~1.6 ns) tracks the instantaneous
    // eigenstates and brings the superposition back where it started.
    const auto ra = run_spin_flip(dev, flip_pulse(5.0), none, det, 28.0);

    CHECK(rf.post_gate_fidelity > rm.post_gate_fidelity);
    CHECK(rm.post_gate_fidelity > rs.post_gate_fidelity);
    CHECK(rs.post_gate_fidelity > ra.post_gate_fidelity);
    CHECK(ra.post_gate_fidelity < 0.3);

    // The spin-flip experiment is only defined at the anticrossing.
    const auto off = calibrate_pulse(M_PI, 0.15, -175.0, dev);
    CHECK_THROWS_AS(run_spin_flip(dev, off, none, det, 6.0), std::invalid_argument);
}

TEST_CASE("reference-width spin flip still clears 0.95 noise-free") {
    const auto pulse = flip_pulse(0.389);
    // The re-based gate pulse keeps its ~19 kV/cm amplitude.
    CHECK(std::fabs(pulse.pulses[0].amplitude) == doctest::Approx(19.3).epsilon(0.02));
    const auto r = run_spin_flip(dev, pulse, NoiseChannels::none(), raw_detection(), 6.0);
    CHECK(r.post_gate_fidelity >= 0.95);
}
