#pragma once

// Calibration of the 1D surrogate's free parameters against reference
// observables: Im(n_slat) against a target scattering rate, and the guided
// fraction of emitter power against a target eta optimum.

#include <vector>

#include "ncfcav/design.hpp"
#include "ncfcav/spectra.hpp"
#include "ncfcav/sweep.hpp"

namespace ncfcav
{
inline constexpr double kTargetKappaScHz = 25e9;

struct LossCalibrationOptions
{
    std::vector<int> n_in = int_range(100, 400, 20);
    int n_out = 400;
    double tolerance = 0.02; // relative, on the fitted kappa_sc
    double im_min = 1e-8;
    double im_max = 1e-2;
    int max_iterations = 60;
};

struct LossCalibration
{
    double slat_loss = 0.0; // Im(n_slat), y-pol
    double kappa_sc_hz = 0.0;
    double target_hz = 0.0;
    int iterations = 0;
};

// kappa_sc fitted over the R0(kappa) family of `design` with the given index model.
KappaScFit family_kappa_sc(const CavityDesign &design, const IndexModel &model,
                           const LossCalibrationOptions &options, int workers = 1);

// Log-bisection on Im(n_slat) until family_kappa_sc hits the target within
// tolerance. Throws FitError(Unreachable) naming the bracket otherwise. Only
// index.slat_loss is varied; the contrast is taken from `index`.
LossCalibration calibrate_slat_loss(const CavityDesign &design, double target_kappa_sc_hz,
                                    const IndexModel &index = IndexModel::calibrated(),
                                    const LossCalibrationOptions &options = {}, int workers = 1);

struct GuidedFractionCalibration
{
    double guided_fraction = 1.0;
    int n_low = 140;
    int n_high = 160;
    double eta_low = 0.0;
    double eta_high = 0.0;
};

// Guided fraction at which eta(n_low) == eta(n_high) at fixed n_out, i.e. the
// eta optimum sits between the two input counts. Throws FitError(Unreachable)
// if no fraction in (0, 1] balances them.
GuidedFractionCalibration calibrate_guided_fraction(const CavityDesign &design, const IndexModel &index,
                                                    int n_low = 140, int n_high = 160, int n_out = 400);

} // namespace ncfcav
