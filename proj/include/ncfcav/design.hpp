#pragma once

// Composite cavity design and its reduction to a 1D effective-index layer stack.
//
// The nanocapillary fiber (NCF) with the external asymmetric defect-mode
// grating is modelled as a sequence of homogeneous segments: slat-covered
// segments carry n_slat, bare fiber segments carry n_base. The grating
// period, duty cycle, defect width and slat counts fix the geometry; the
// fiber diameters, slat height and media indices are carried as metadata
// for a future mode solver.
//
// Lengths are in nm except slat_height (um).

#include <cstddef>
#include <string_view>
#include <vector>

#include "ncfcav/units.hpp"

namespace ncfcav
{
enum class Polarization
{
    YPol,
    XPol,
};

std::string_view to_string(Polarization p);
Polarization parse_polarization(std::string_view text); // throws ConfigError

// Reference geometry at which the effective indices are anchored.
inline constexpr double kReferencePeriodNm = 244.0;
inline constexpr double kDefectToPeriodRatio = 1.5;

// Cavity resonance targets for the two input-mode polarizations.
double target_resonance_nm(Polarization p);

struct CavityDesign
{
    double grating_period = 244.0;  // nm
    double duty_cycle = 0.15;
    double slat_thickness = 36.6;   // nm, duty_cycle * grating_period
    double slat_height = 2.0;       // um (metadata)
    double defect_width = 366.0;    // nm, 1.5 * grating_period
    int n_slats_input = 150;
    int n_slats_output = 400;
    double ncf_inner_diameter = 125.0; // nm (metadata)
    double ncf_outer_diameter = 515.0; // nm (metadata)
    double n_silica = 1.45;
    double n_water = 1.33;
    Polarization polarization_profile = Polarization::YPol;

    // Throws ConfigError on any violated invariant.
    void validate() const;

    CavityDesign with_slats(int n_in, int n_out) const;
    CavityDesign with_profile(Polarization p) const;

    bool operator==(const CavityDesign &) const = default;
};

// Geometry with t and w_g derived from the period and duty cycle.
CavityDesign make_design(double grating_period_nm, double duty_cycle, int n_in, int n_out,
                         Polarization p = Polarization::YPol);

struct EffectiveIndexProfile
{
    Complex n_base{1.0, 0.0};
    Complex n_slat{1.0, 0.0};
    double n_exterior_left = 1.0;
    double n_exterior_right = 1.0;

    // Period-averaged real index for duty cycle `duty`.
    double mean_index(double duty) const { return duty * n_slat.real() + (1.0 - duty) * n_base.real(); }
    double modulation() const { return n_slat.real() - n_base.real(); }
};

// Free parameters of the 1D surrogate. The mean index is pinned by the Bragg
// condition; these set the grating strength and the slat scattering loss.
struct IndexModel
{
    // Re(n_slat) - Re(n_base) for the y-polarized profile.
    double index_contrast = 0.0;
    // x-pol contrast relative to y-pol (weaker modulation along x).
    double xpol_contrast_ratio = 0.0;
    // Im(n_slat) for the y-polarized profile; x-pol uses slat_loss * ratio^2.
    double slat_loss = 0.0;

    static IndexModel lossless();
    static IndexModel calibrated();

    bool operator==(const IndexModel &) const = default;
};

// Profile for design.polarization_profile. Satisfies
// 2 * mean_index * kReferencePeriodNm == target_resonance_nm(profile).
EffectiveIndexProfile effective_indices(const CavityDesign &design,
                                        const IndexModel &model = IndexModel::lossless());

struct Layer
{
    double thickness = 0.0; // nm
    Complex index{1.0, 0.0};

    bool operator==(const Layer &) const = default;
};

struct LayerStack
{
    std::vector<Layer> layers;
    double source_plane = 0.0; // nm from the left edge
    double n_left = 1.0;
    double n_right = 1.0;

    double total_length() const;
    // Index of the layer containing z (interior point); throws ConfigError outside.
    std::size_t layer_at(double z) const;
    // Left-right mirror image; the source plane is mirrored too.
    LayerStack reversed() const;
    double max_real_index() const;
    bool lossless() const;

    bool operator==(const LayerStack &) const = default;
};

// [input mirror] [defect] [output mirror]. Each mirror starts with a slat
// adjacent to the defect; the input mirror faces the left (collection)
// exterior. The source plane sits at the defect center.
LayerStack build_stack(const CavityDesign &design, const EffectiveIndexProfile &profile);

// Rescale the period (and t, w_g with it) so the resonance moves by `detuning_nm`.
// |detuning_nm| must not exceed kMaxDetuningNm.
inline constexpr double kMaxDetuningNm = 10.0;
CavityDesign detune_design(const CavityDesign &design, double detuning_nm);

} // namespace ncfcav
