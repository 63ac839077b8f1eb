#pragma once

namespace excsim {

// Reduced Planck constant in the unit system used throughout:
// energies in ueV, times in ns, fields in kV/cm.
inline constexpr double kHbar = 0.6582119569; // ueV * ns

// Gaussian FWHM -> sigma conversion factor, 2*sqrt(2*ln 2).
inline constexpr double kFwhmToSigma = 2.354820045030949;

} // namespace excsim
