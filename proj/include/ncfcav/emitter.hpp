#pragma once

// Emitter-in-cavity observables for a scalar point source in the 1D stack.
//
// All powers are relative to the same emitter in a homogeneous medium of
// the defect index (P0). With r_L, r_R the mirror reflections referenced to
// the source plane and D = 1 - r_L r_R:
//
//   P_1D   = Re[(1 + r_L)(1 + r_R) / D]
//   a_L    = t_L (1 + r_R) / D,   a_R = t_R (1 + r_L) / D
//   p_left = n_L |a_L|^2 / (2 Re n_defect)   (p_right alike)
//
// A real emitter next to a nanofiber also radiates into unguided modes that
// the grating does not touch. EmitterModel::guided_fraction (beta) is the
// share of P0 that couples to the guided channel; the remaining 1 - beta is
// added to the total as cavity-independent radiation. beta = 1 is the bare
// 1D problem.

#include <cstddef>
#include <vector>

#include "ncfcav/design.hpp"
#include "ncfcav/tmm.hpp"

namespace ncfcav
{
struct EmitterModel
{
    double guided_fraction = 1.0;

    static EmitterModel bare() { return {}; }
    static EmitterModel calibrated();
};

struct EmissionResult
{
    double purcell = 0.0;   // P_c / P0
    double eta_left = 0.0;  // guided power out of the left (collection) exterior / P_c
    double eta_right = 0.0;
    double eta_loss = 0.0;  // absorbed in the stack or radiated into unguided modes
    double p_total = 0.0;   // == purcell
    double p_left = 0.0;    // == purcell * eta_left
    double p_right = 0.0;
    double p_radiated = 0.0; // unguided share, 1 - guided_fraction
};

// Fold the bare 1D powers into an EmissionResult under `model`.
EmissionResult combine_powers(double p_guided_total, double p_left, double p_right, const EmitterModel &model);

// Closed form on given mirror coefficients.
EmissionResult emit_from_coefficients(const MirrorCoefficients &mc, const EmitterModel &model = {});

// Throws NumericalError when |1 - r_L r_R| < 1e-12.
EmissionResult emit(const LayerStack &stack, double lambda_nm, const EmitterModel &model = {});

struct EmissionSample
{
    double wavelength;
    EmissionResult result;
};

// Adaptive grid refined around Purcell peaks.
std::vector<EmissionSample> emission_spectrum(const LayerStack &stack, double lambda_min, double lambda_max,
                                              std::size_t n_samples, const EmitterModel &model = {});

struct OracleOptions
{
    // Coarsest grid, points per wavelength in the densest medium (>= 40).
    double points_per_wavelength = 40.0;
    // Maximum disagreement of the two Richardson estimates.
    double convergence_tolerance = 1e-3;
    // Times the grid may be halved again when the estimates disagree.
    int max_doublings = 5;
};

struct OracleResult
{
    EmissionResult emission;
    double richardson_gap = 0.0; // max difference between successive extrapolations
    std::size_t finest_nodes = 0;
};

// Finite-difference solve of E'' + k0^2 n(z)^2 E = -delta(z - z_s) with
// exact discrete outgoing-wave boundaries, on three nested grids, Richardson
// extrapolated. If successive extrapolations differ by more than the
// tolerance the whole ladder is repeated at twice the resolution, up to
// max_doublings times; after that NumericalError is thrown.
OracleResult helmholtz_oracle(const LayerStack &stack, double lambda_nm, const OracleOptions &options = {},
                              const EmitterModel &model = {});

// Finite-difference reflectance for a unit plane wave from the left, same
// grids and refinement check as helmholtz_oracle. Independent check of the
// transfer-matrix R.
double helmholtz_reflectance(const LayerStack &stack, double lambda_nm, const OracleOptions &options = {});

// |E(z)|^2 of the source-driven field, normalized to max 1.
std::vector<IntensitySample> dipole_intensity_profile(const LayerStack &stack, double lambda_nm,
                                                      int points_per_layer = 16);

// integral of I(z) dz / max I over the stack, in nm. Throws NumericalError
// ("no confined mode") if the intensity peaks at a stack edge.
double effective_length(const LayerStack &stack, double lambda_nm);

} // namespace ncfcav
