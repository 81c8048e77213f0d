#pragma once

// Resonance extraction from reflection spectra: dip detection, Lorentzian
// dip fitting, linewidth to decay-rate conversion, coupling-regime
// classification and the scattering-rate fit over a family of dips.
//
// Rates are ordinary-frequency linewidths in Hz (kappa = c * dlambda / lambda^2).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ncfcav/tmm.hpp"

namespace ncfcav
{
struct DipGuess
{
    double lambda0 = 0.0;      // nm
    double delta_lambda = 0.0; // nm, FWHM
    double r0 = 0.0;
    double baseline = 0.0;
    double noise_floor = 0.0;
    // Search window; the fit window is clipped to it.
    double window_min = 0.0;
    double window_max = 0.0;
};

// Deepest interior local minimum of R inside [window_min, window_max].
// Throws FitError(NoDipFound) if none lies below baseline - 3 * noise floor.
DipGuess find_dip(const Spectrum &spectrum, double window_min, double window_max);
DipGuess find_dip(std::span<const double> wavelengths, std::span<const double> reflectance, double window_min,
                  double window_max);

// R(lambda) = B - (B - R0) (dl/2)^2 / ((lambda - l0)^2 + (dl/2)^2)
double lorentzian_dip(double lambda_nm, double lambda0, double delta_lambda, double r0, double baseline);

struct FitOptions
{
    double window_linewidths = 5.0; // half-width of the fit window, in linewidths
    int max_iterations = 200;
    double step_tolerance = 1e-10; // relative parameter step
};

struct ResonanceFit
{
    double lambda0 = 0.0;
    double delta_lambda = 0.0;
    double r0 = 0.0;
    double baseline = 0.0;
    double q = 0.0;
    double kappa_hz = 0.0;
    double residual_rms = 0.0;
    double sigma_lambda0 = 0.0;
    double sigma_delta_lambda = 0.0;
    double sigma_r0 = 0.0;
    double sigma_baseline = 0.0;
    int iterations = 0;
    std::size_t points = 0;
    bool r0_clamped = false; // fitted R0 was slightly negative and set to 0
};

// Levenberg-Marquardt fit over lambda0 +- window_linewidths * delta_lambda.
// Throws FitError(NotConverged) or FitError(GridLimited) (fitted linewidth
// narrower than two sample steps).
ResonanceFit fit_lorentzian(const Spectrum &spectrum, const DipGuess &guess, const FitOptions &options = {});
ResonanceFit fit_lorentzian(std::span<const double> wavelengths, std::span<const double> reflectance,
                            const DipGuess &guess, const FitOptions &options = {});

enum class Regime
{
    Over,
    Critical,
    Under,
};

std::string_view to_string(Regime r);

struct CouplingRegime
{
    Regime regime = Regime::Critical;
    double kappa_hz = 0.0;
    double kappa_sc_hz = 0.0;
    double tolerance = 0.0;
    // kappa - 2 kappa_sc, the comparison the label is drawn from.
    double margin_hz = 0.0;
};

inline constexpr double kCriticalTolerance = 0.05;

// Critical if |kappa - 2 kappa_sc| <= tolerance * kappa, else Over (kappa > 2 kappa_sc) or Under.
CouplingRegime classify_regime(double kappa_hz, double kappa_sc_hz, double tolerance = kCriticalTolerance);

struct R0Point
{
    double kappa_hz;
    double r0;
};

struct KappaScFit
{
    double kappa_sc_hz = 0.0;
    double sigma_hz = 0.0;
    double residual_rms = 0.0;
    std::size_t points = 0;
    bool poorly_constrained = false;
};

// On-resonance reflectivity of a one-sided cavity with total decay kappa.
double r0_model(double kappa_hz, double kappa_sc_hz);

// Least squares of sum (r0_i - (1 - 2 kappa_sc / kappa_i)^2)^2 over
// kappa_sc in (0, max kappa_i / 2].
KappaScFit fit_kappa_sc(std::span<const R0Point> points);

} // namespace ncfcav
