#pragma once

// Normal-incidence 2x2 transfer-matrix engine.
//
// Conventions (fixed throughout the library):
//   * fields vary as exp(-i w t); a forward wave in a medium of index n is
//     exp(+i k0 n z), so absorption is Im(n) > 0;
//   * a TransferMatrix maps the (forward, backward) amplitudes on the right
//     exterior to those on the left exterior: (A_L, B_L) = M (A_R, B_R);
//   * left incidence: r = m21 / m11, t = 1 / m11;
//     right incidence: r' = -m12 / m11, t' = det(M) / m11.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ncfcav/design.hpp"
#include "ncfcav/units.hpp"

namespace ncfcav
{
struct TransferMatrix
{
    Complex m11{1.0, 0.0};
    Complex m12{0.0, 0.0};
    Complex m21{0.0, 0.0};
    Complex m22{1.0, 0.0};

    Complex det() const { return m11 * m22 - m12 * m21; }
    TransferMatrix operator*(const TransferMatrix &o) const
    {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }
};

// Amplitude-basis matrix of `layers` embedded between media n_left and n_right.
TransferMatrix layers_matrix(std::span<const Layer> layers, Complex n_left, Complex n_right,
                             double lambda_nm);

TransferMatrix stack_matrix(const LayerStack &stack, double lambda_nm);

struct Amplitudes
{
    Complex r;
    Complex t;
};

Amplitudes rt_left_incidence(const LayerStack &stack, double lambda_nm);
Amplitudes rt_right_incidence(const LayerStack &stack, double lambda_nm);

struct Spectrum
{
    std::vector<double> wavelengths; // nm, ascending
    std::vector<Complex> r;
    std::vector<Complex> t;
    std::vector<double> R;
    std::vector<double> T;

    std::size_t size() const { return wavelengths.size(); }
};

struct SpectrumSample
{
    Complex r;
    Complex t;
    double R;
    double T;
};

SpectrumSample sample_spectrum(const LayerStack &stack, double lambda_nm);

enum class Extremum
{
    Minimum,
    Maximum,
};

// Uniform grid over [lambda_min, lambda_max] plus dense samples around every
// resolved extremum of `f`: at least 60 samples per half-depth linewidth,
// covering +-5 linewidths.
std::vector<double> adaptive_grid(const std::function<double(double)> &f, double lambda_min,
                                  double lambda_max, std::size_t n_samples, Extremum kind);

// Left-incidence spectrum with adaptive refinement around reflection dips.
Spectrum reflection_spectrum(const LayerStack &stack, double lambda_min, double lambda_max,
                             std::size_t n_samples);

// Spectrum on an explicit wavelength grid (no refinement).
Spectrum spectrum_on_grid(const LayerStack &stack, std::span<const double> wavelengths);

// Two-mirror decomposition about a source plane inside one layer (the defect).
// r_left/t_left: the sub-stack left of the defect seen from inside the defect
// (r at the defect's left boundary, t into the left exterior); likewise for
// the right. phase_left/right: one-way phase k0 n_defect d from the source
// plane to each boundary (complex when the defect is lossy).
struct MirrorCoefficients
{
    Complex r_left, t_left;
    Complex r_right, t_right;
    Complex phase_left, phase_right;
    Complex n_defect;
    double n_exterior_left = 1.0;
    double n_exterior_right = 1.0;

    // Coefficients referenced to the source plane.
    Complex r_left_at_source() const;
    Complex r_right_at_source() const;
    Complex t_left_at_source() const;
    Complex t_right_at_source() const;
};

MirrorCoefficients mirror_coefficients(const LayerStack &stack, double source_plane, double lambda_nm);

enum class Side
{
    Left,
    Right,
};

struct IntensitySample
{
    double z;         // nm from the left edge of the stack
    double intensity; // |E|^2, normalized to max 1
};

// Electric-field state (E, H-like) at a point: E = A + B, H = n (A - B).
struct FieldState
{
    Complex e;
    Complex h;
};

// Samples |E|^2 from z0 to one edge of the stack, starting from `state`
// taken just on the `toward` side of z0. Not normalized.
std::vector<IntensitySample> propagate_intensity(const LayerStack &stack, double lambda_nm, double z0,
                                                 FieldState state, Side toward, int points_per_layer);

// |E(z)|^2 for a unit plane wave incident from `incidence`, sampled at
// points_per_layer (>= 8) points per layer, normalized to max 1.
std::vector<IntensitySample> intensity_profile(const LayerStack &stack, double lambda_nm, Side incidence,
                                               int points_per_layer = 8);

} // namespace ncfcav
