#include "excsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "excsim/units.hpp"

namespace excsim {

NoiseChannels build_noise(const DeviceParams& p) {
    p.validate();
    return {1.0 / p.tau_r, 1.0 / p.T_cross, 0.5 / p.T_spin};
}

QubitState free_evolve(const QubitState& state, double s_ueV, double t_ns) {
    if (t_ns < 0.0) throw std::invalid_argument("free_evolve: t must be >= 0");
    QubitState out = state;
    out.amplitudes(1) *= std::polar(1.0, s_ueV * t_ns / kHbar);
    return out;
}

Eigen::Matrix2cd exact_propagator(double field, const DeviceParams& p, double t_ns) {
    // H = (s/2) n.sigma with n = (sin 2chi, 0, cos 2chi);
    // exp(-i H t / hbar) = cos(a) I - i sin(a) n.sigma, a = s t / (2 hbar).
    const double delta = detuning(field, p);
    const double s = splitting(field, p);
    const double a = 0.5 * s * t_ns / kHbar;
    const double nz = delta / s;
    const double nx = p.s0 / s;
    const complexd c = std::cos(a);
    const complexd ms = complexd(0.0, -std::sin(a));
    Eigen::Matrix2cd u;
    u << c + ms * nz, ms * nx,
         ms * nx, c - ms * nz;
    return u;
}

namespace {

struct Rhs {
    const PulseProfile* pulse;
    const DeviceParams* params;
    NoiseChannels noise;

    Rho3 operator()(double t, const Rho3& rho) const {
        const double field = pulse->field_at(t);
        const double delta = detuning(field, *params);

        Rho3 drho = Rho3::Zero();
        const Eigen::Matrix2cd rx = rho.block<2, 2>(1, 1);

        // Coherent part, exciton subspace only.
        Eigen::Matrix2cd h;
        h << 0.5 * delta, 0.5 * params->s0,
             0.5 * params->s0, -0.5 * delta;
        Eigen::Matrix2cd dx = complexd(0.0, -1.0 / kHbar) * (h * rx - rx * h);

        // Radiative decay |g><H|, |g><V| at radiative_rate each.
        if (noise.radiative_rate > 0.0) {
            drho(0, 0) += noise.radiative_rate * (rx(0, 0) + rx(1, 1));
            dx -= noise.radiative_rate * rx;
        }

        if (noise.dephasing_rate > 0.0 || noise.spin_flip_rate > 0.0) {
            // Instantaneous eigenbasis of h.
            const double chi = 0.5 * std::atan2(params->s0, delta);
            Eigen::Vector2cd e0(std::cos(chi), std::sin(chi));
            Eigen::Vector2cd e1(-std::sin(chi), std::cos(chi));
            const Eigen::Matrix2cd p0 = e0 * e0.adjoint();
            const Eigen::Matrix2cd p1 = e1 * e1.adjoint();

            if (noise.dephasing_rate > 0.0) {
                dx -= noise.dephasing_rate * (p0 * rx * p1 + p1 * rx * p0);
            }
            if (noise.spin_flip_rate > 0.0) {
                const double g = noise.spin_flip_rate;
                const complexd r00 = (e0.adjoint() * rx * e0)(0);
                const complexd r11 = (e1.adjoint() * rx * e1)(0);
                // D[|e0><e1|] + D[|e1><e0|], each at rate g.
                dx += g * (r11.real() * p0 + r00.real() * p1);
                dx -= 0.5 * g * (p1 * rx + rx * p1 + p0 * rx + rx * p0);
            }
        }

        drho.block<2, 2>(1, 1) = dx;
        return drho;
    }
};

Rho3 rk4_step(const Rhs& rhs, double t, double h, const Rho3& rho) {
    const Rho3 k1 = rhs(t, rho);
    const Rho3 k2 = rhs(t + 0.5 * h, rho + 0.5 * h * k1);
    const Rho3 k3 = rhs(t + 0.5 * h, rho + 0.5 * h * k2);
    const Rho3 k4 = rhs(t + h, rho + h * k3);
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

Trajectory propagate(const Rho3& rho0, const PulseProfile& pulse, const DeviceParams& p,
                     const NoiseChannels& noise, std::span<const double> t_grid, double step) {
    p.validate();
    if (!(step > 0.0)) throw std::invalid_argument("propagate: step must be > 0");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
            throw std::invalid_argument("propagate: t_grid must be non-negative and strictly increasing");
    }

    const Rhs rhs{&pulse, &p, noise};
    Trajectory out;
    out.t.assign(t_grid.begin(), t_grid.end());
    out.rho.reserve(t_grid.size());

    Rho3 rho = rho0;
    double t = 0.0;
    for (double target : t_grid) {
        const double interval = target - t;
        const int n = interval > 0.0 ? static_cast<int>(std::ceil(interval / step - 1e-12)) : 0;
        const double h = n > 0 ? interval / n : 0.0;
        for (int i = 0; i < n; ++i) {
            rho = rk4_step(rhs, t + i * h, h, rho);
        }
        t = target;
        if (!rho.allFinite()) {
            throw std::runtime_error("propagate: integrator failure at t = " + std::to_string(t) + " ns");
        }
        out.rho.push_back(rho);
    }
    return out;
}

namespace {

double adaptive_simpson(const auto& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double accumulated_phase(const PulseProfile& pulse, const DeviceParams& p, double t_ns,
                         double rel_tol) {
    if (t_ns < 0.0) throw std::invalid_argument("accumulated_phase: t must be >= 0");
    if (t_ns == 0.0) return 0.0;
    const auto f = [&](double tau) { return splitting(pulse.field_at(tau), p) / kHbar; };
    // Split at pulse centers so the adaptive rule sees the sharp features.
    std::vector<double> knots{0.0, t_ns};
    for (const auto& g : pulse.pulses) {
        for (double k : {g.center - g.fwhm, g.center, g.center + g.fwhm}) {
            if (k > 0.0 && k < t_ns) knots.push_back(k);
        }
    }
    std::sort(knots.begin(), knots.end());
    const double scale = f(0.0) * t_ns + 1e-30;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i], b = knots[i + 1];
        if (!(b > a)) continue;
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive_simpson(f, a, b, fa, fm, fb, whole, rel_tol * scale, 40);
    }
    return total;
}

std::vector<Trajectory> propagate_batch_serial(std::span<const PropagationJob> jobs,
                                               const DeviceParams& p,
                                               std::span<const double> t_grid, double step) {
    std::vector<Trajectory> out(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        out[i] = propagate(jobs[i].rho0, jobs[i].pulse, p, jobs[i].noise, t_grid, step);
    }
    return out;
}

std::vector<Trajectory> propagate_batch(std::span<const PropagationJob> jobs,
                                        const DeviceParams& p, std::span<const double> t_grid,
                                        double step, int workers) {
    std::vector<Trajectory> out(jobs.size());
#ifdef _OPENMP
    const std::int64_t n = static_cast<std::int64_t>(jobs.size());
    if (workers > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (std::int64_t i = 0; i < n; ++i) {
            out[i] = propagate(jobs[i].rho0, jobs[i].pulse, p, jobs[i].noise, t_grid, step);
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) {
            out[i] = propagate(jobs[i].rho0, jobs[i].pulse, p, jobs[i].noise, t_grid, step);
        }
    }
#else
    (void)workers;
    out = propagate_batch_serial(jobs, p, t_grid, step);
#endif
    return out;
}

std::vector<double> bin_centers(double t_end, double bin) {
    if (!(bin > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("bin_centers: t_end and bin must be > 0");
    const int n = static_cast<int>(std::round(t_end / bin));
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = (i + 0.5) * bin;
    return t;
}

} // namespace excsim
