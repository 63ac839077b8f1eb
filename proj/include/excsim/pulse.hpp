#pragma once

#include <optional>
#include <vector>

namespace excsim {

/// Single Gaussian field excursion. Amplitude is signed: it adds to the
/// baseline field, so a negative amplitude drives the field more negative.
struct GaussianPulse {
    double amplitude = 0.0; // kV/cm
    double center = 0.0;    // ns
    double fwhm = 0.5;      // ns
};

/// Damped post-pulse oscillation of the electrical signal.
struct Ringing {
    double fraction = 0.15;     // of the pulse amplitude
    double frequency = 2.0;     // GHz
    double damping_time = 0.5;  // ns
};

struct PulseProfile {
    double baseline_field = 0.0; // kV/cm
    std::vector<GaussianPulse> pulses;
    std::optional<Ringing> ringing; // off by default

    double field_at(double t) const;
};

inline double field_of_time(const PulseProfile& pulse, double t) {
    return pulse.field_at(t);
}

} // namespace excsim
