#pragma once

#include <complex>
#include <numbers>

namespace ncfcav
{
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

inline constexpr double kNmToM = 1e-9;
inline constexpr double kUmToM = 1e-6;
inline constexpr double kGHz = 1e9;

// Ordinary-frequency linewidth (Hz) of a resonance of FWHM `fwhm_nm` at `lambda_nm`.
inline constexpr double linewidth_hz(double lambda_nm, double fwhm_nm)
{
    return kSpeedOfLight * fwhm_nm * kNmToM / (lambda_nm * kNmToM * lambda_nm * kNmToM);
}

// Inverse of linewidth_hz.
inline constexpr double linewidth_nm(double lambda_nm, double kappa_hz)
{
    return kappa_hz * (lambda_nm * kNmToM) * (lambda_nm * kNmToM) / kSpeedOfLight / kNmToM;
}

inline constexpr double optical_frequency_hz(double lambda_nm)
{
    return kSpeedOfLight / (lambda_nm * kNmToM);
}

} // namespace ncfcav
