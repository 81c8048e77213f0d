#pragma once

// Frozen calibration of the 1D surrogate. Regenerate with
// `ncfcav calibrate` (see README) and paste the reported values here;
// tests/unit/test_calibration.cpp checks that they still reproduce their targets.

namespace ncfcav::calibration
{
// Re(n_slat) - Re(n_base), y-pol.
inline constexpr double kIndexContrast = 0.029;
// x-pol / y-pol index modulation.
inline constexpr double kXPolContrastRatio = 0.805;
// Im(n_slat), y-pol.
inline constexpr double kSlatLoss = 1.44595990307e-4;
// Fraction of free-space emitter power coupled to the guided channel.
inline constexpr double kGuidedFraction = 0.122514741316;

} // namespace ncfcav::calibration
