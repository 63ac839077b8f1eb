#include "excsim/photonics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace excsim {

Rho3 encode_exciton(const Polarization& pol_in) {
    if (std::abs(pol_in.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("encode_exciton: input not normalized");
    Rho3 rho = Rho3::Zero();
    const Eigen::Vector2cd a = pol_in.amplitudes;
    rho.block<2, 2>(1, 1) = a * a.adjoint();
    return rho;
}

TimeTrace emission_intensity(const Trajectory& traj, const Polarization& analyzer,
                             const DeviceParams& p) {
    if (std::abs(analyzer.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("emission_intensity: analyzer not normalized");
    if (traj.t.size() < 2) throw std::invalid_argument("emission_intensity: trajectory too short");
    const double bin = traj.t[1] - traj.t[0];
    for (std::size_t i = 1; i < traj.t.size(); ++i) {
        if (std::abs(traj.t[i] - traj.t[i - 1] - bin) > 1e-9 * bin)
            throw std::invalid_argument("emission_intensity: trajectory times not uniform");
    }
    TimeTrace out;
    out.t_start = traj.t[0] - 0.5 * bin;
    out.bin_width = bin;
    out.value.resize(traj.t.size());
    out.valid.assign(traj.t.size(), 1);
    const Eigen::Vector2cd a = analyzer.amplitudes;
    for (std::size_t i = 0; i < traj.rho.size(); ++i) {
        const Eigen::Matrix2cd rx = exciton_block(traj.rho[i]);
        out.value[i] = (a.adjoint() * rx * a)(0).real() / p.tau_r;
        if (out.value[i] < 0.0) out.value[i] = 0.0;
    }
    return out;
}

TimeTrace apply_detection(const TimeTrace& trace, const DetectionModel& det,
                          const PulseProfile& field, std::uint64_t seed) {
    TimeTrace out = trace;
    const double sigma =
        std::hypot(det.irf_sigma, det.init_jitter_sigma);
    if (sigma > 0.0) {
        if (!(trace.bin_width < 0.5 * sigma))
            throw std::invalid_argument("apply_detection: bins must be finer than sigma/2");
        const int half = static_cast<int>(std::ceil(5.0 * sigma / trace.bin_width));
        std::vector<double> kernel(2 * half + 1);
        double sum = 0.0;
        for (int k = -half; k <= half; ++k) {
            const double u = k * trace.bin_width / sigma;
            kernel[k + half] = std::exp(-0.5 * u * u);
            sum += kernel[k + half];
        }
        for (auto& v : kernel) v /= sum;
        const int n = static_cast<int>(trace.size());
        std::vector<double> smeared(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int k = -half; k <= half; ++k) {
                const int j = i - k;
                if (j >= 0 && j < n) acc += kernel[k + half] * trace.value[j];
            }
            smeared[i] = acc;
        }
        out.value = std::move(smeared);
    }
    if (det.stark_window_sigma > 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double df = field.field_at(out.bin_center(i)) - det.reference_field;
            out.value[i] *= std::exp(-0.5 * df * df /
                                     (det.stark_window_sigma * det.stark_window_sigma));
        }
    }
    if (det.poisson_enabled) {
        // One conversion factor for every channel: the budget counts the
        // photons of a unit-probability emission curve, so paired analyzer
        // traces keep their intensity ratio in expectation.
        const double scale = det.photon_budget * out.bin_width;
        std::mt19937_64 rng(seed);
        for (auto& v : out.value) {
            std::poisson_distribution<long> pd(v * scale);
            v = static_cast<double>(pd(rng));
        }
    }
    return out;
}

TimeTrace normalize_pair(const TimeTrace& trace_p, const TimeTrace& trace_pbar) {
    if (trace_p.size() != trace_pbar.size() ||
        std::abs(trace_p.t_start - trace_pbar.t_start) > 1e-12 ||
        std::abs(trace_p.bin_width - trace_pbar.bin_width) > 1e-12)
        throw std::invalid_argument("normalize_pair: mismatched bins");
    TimeTrace out = trace_p;
    out.channel = trace_p.channel + "_norm";
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double denom = trace_p.value[i] + trace_pbar.value[i];
        if (denom > 0.0) {
            out.value[i] = trace_p.value[i] / denom;
            out.valid[i] = trace_p.valid[i] && trace_pbar.valid[i];
        } else {
            out.value[i] = 0.0;
            out.valid[i] = 0;
        }
    }
    return out;
}

std::vector<Eigen::Vector3d> bloch_from_traces(const TimeTrace& norm_hv,
                                               const TimeTrace& norm_da,
                                               const TimeTrace& norm_rl) {
    if (norm_hv.size() != norm_da.size() || norm_hv.size() != norm_rl.size())
        throw std::invalid_argument("bloch_from_traces: mismatched bins");
    std::vector<Eigen::Vector3d> r(norm_hv.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = {2.0 * norm_da.value[i] - 1.0,
                2.0 * norm_rl.value[i] - 1.0,
                2.0 * norm_hv.value[i] - 1.0};
    }
    return r;
}

} // namespace excsim
