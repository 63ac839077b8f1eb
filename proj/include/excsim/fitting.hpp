#pragma once

#include <span>
#include <stdexcept>

#include "excsim/photonics.hpp"

namespace excsim {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Least squares of y = offset + a*cos(omega t) + b*sin(omega t) at fixed
/// omega. Phase convention: y = offset + amplitude*cos(omega t + phase).
struct FixedFreqCosineFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase = 0.0; // radians
};

FixedFreqCosineFit fit_fixed_freq_cosine(std::span<const double> t, std::span<const double> y,
                                         double omega);

/// Variable-projection fit of y = exp(-lambda t) * (offset + a cos(omega t)
/// + b sin(omega t)); the offset term is optional.
struct DampedCosineFit {
    double omega = 0.0;      // rad/ns
    double lambda = 0.0;     // 1/ns
    double amplitude = 0.0;  // of the cosine, y = e^{-lt}(off + amp cos(wt + phase))
    double phase = 0.0;
    double offset = 0.0;
    double omega_stderr = 0.0;
    double rss = 0.0;
};

DampedCosineFit fit_damped_cosine(std::span<const double> t, std::span<const double> y,
                                  bool with_offset);

struct SplittingFit {
    double s = 0.0;        // ueV
    double stderr_s = 0.0; // ueV
};

/// Damped-cosine fit of an intensity trace; returns hbar * omega.
/// Throws FitError when the window covers fewer than two periods.
SplittingFit fit_splitting(const TimeTrace& trace);

struct ExpDecayFit {
    double amplitude = 0.0;
    double time_constant = 0.0; // ns
};

/// Log-linear fit of y = amplitude * exp(-t / time_constant), y > 0.
ExpDecayFit fit_exp_decay(std::span<const double> t, std::span<const double> y);

} // namespace excsim
