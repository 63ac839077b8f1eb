#include "excsim/pulse.hpp"

#include <cmath>
#include <stdexcept>

#include "excsim/units.hpp"

namespace excsim {

double PulseProfile::field_at(double t) const {
    double f = baseline_field;
    for (const auto& g : pulses) {
        if (!(g.fwhm > 0.0)) throw std::invalid_argument("PulseProfile: fwhm must be > 0");
        const double sigma = g.fwhm / kFwhmToSigma;
        const double u = (t - g.center) / sigma;
        f += g.amplitude * std::exp(-0.5 * u * u);
        if (ringing && t > g.center) {
            const double dt = t - g.center;
            f += ringing->fraction * g.amplitude * std::exp(-dt / ringing->damping_time) *
                 std::sin(2.0 * M_PI * ringing->frequency * dt);
        }
    }
    return f;
}

} // namespace excsim
