#include "ncfcav/design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncfcav/calibration.hpp"
#include "ncfcav/error.hpp"

namespace ncfcav
{
namespace
{
constexpr double kRelTol = 1e-9;

bool close_rel(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

void require(bool ok, const std::string &message)
{
    if (!ok)
        throw ConfigError(message);
}
} // namespace

std::string_view to_string(Polarization p)
{
    return p == Polarization::YPol ? "ypol" : "xpol";
}

Polarization parse_polarization(std::string_view text)
{
    if (text == "ypol" || text == "YPol" || text == "y")
        return Polarization::YPol;
    if (text == "xpol" || text == "XPol" || text == "x")
        return Polarization::XPol;
    throw ConfigError("unknown polarization profile '" + std::string(text) + "' (expected ypol or xpol)");
}

double target_resonance_nm(Polarization p)
{
    return p == Polarization::YPol ? 620.0 : 619.0;
}

void CavityDesign::validate() const
{
    require(std::isfinite(grating_period) && grating_period > 0, "grating_period must be > 0");
    require(duty_cycle > 0 && duty_cycle < 1, "duty_cycle must lie in (0, 1)");
    require(slat_thickness > 0, "slat_thickness must be > 0");
    require(slat_height > 0, "slat_height must be > 0");
    require(defect_width > 0, "defect_width must be > 0");
    require(ncf_inner_diameter > 0 && ncf_outer_diameter > 0, "NCF diameters must be > 0");
    require(n_slats_input >= 0 && n_slats_output >= 0, "slat counts must be >= 0");
    require(close_rel(slat_thickness, duty_cycle * grating_period, kRelTol),
            "slat_thickness must equal duty_cycle * grating_period");
    require(close_rel(defect_width, kDefectToPeriodRatio * grating_period, kRelTol),
            "defect_width must equal 1.5 * grating_period");
    require(n_silica >= 1 && n_water >= 1, "media refractive indices must be >= 1");
}

CavityDesign CavityDesign::with_slats(int n_in, int n_out) const
{
    CavityDesign d = *this;
    d.n_slats_input = n_in;
    d.n_slats_output = n_out;
    return d;
}

CavityDesign CavityDesign::with_profile(Polarization p) const
{
    CavityDesign d = *this;
    d.polarization_profile = p;
    return d;
}

CavityDesign make_design(double grating_period_nm, double duty_cycle, int n_in, int n_out, Polarization p)
{
    CavityDesign d;
    d.grating_period = grating_period_nm;
    d.duty_cycle = duty_cycle;
    d.slat_thickness = duty_cycle * grating_period_nm;
    d.defect_width = kDefectToPeriodRatio * grating_period_nm;
    d.n_slats_input = n_in;
    d.n_slats_output = n_out;
    d.polarization_profile = p;
    return d;
}

IndexModel IndexModel::lossless()
{
    return IndexModel{calibration::kIndexContrast, calibration::kXPolContrastRatio, 0.0};
}

IndexModel IndexModel::calibrated()
{
    return IndexModel{calibration::kIndexContrast, calibration::kXPolContrastRatio, calibration::kSlatLoss};
}

EffectiveIndexProfile effective_indices(const CavityDesign &design, const IndexModel &model)
{
    design.validate();
    if (model.index_contrast <= 0 || model.xpol_contrast_ratio <= 0 || model.xpol_contrast_ratio > 1)
        throw ConfigError("index model needs index_contrast > 0 and xpol_contrast_ratio in (0, 1]");
    if (model.slat_loss < 0)
        throw ConfigError("slat_loss must be >= 0 (passive media only)");

    const bool ypol = design.polarization_profile == Polarization::YPol;
    const double ratio = ypol ? 1.0 : model.xpol_contrast_ratio;
    const double contrast = model.index_contrast * ratio;
    const double loss = model.slat_loss * ratio * ratio;

    // Bragg condition at the reference period fixes the period-averaged index.
    const double mean = target_resonance_nm(design.polarization_profile) / (2.0 * kReferencePeriodNm);
    const double n_base = mean - design.duty_cycle * contrast;
    if (n_base < 1.0)
        throw ConfigError("effective base index fell below 1; reduce index_contrast");

    EffectiveIndexProfile profile;
    profile.n_base = Complex(n_base, 0.0);
    profile.n_slat = Complex(n_base + contrast, loss);
    profile.n_exterior_left = n_base;
    profile.n_exterior_right = n_base;
    return profile;
}

double LayerStack::total_length() const
{
    double sum = 0.0;
    for (const auto &l : layers)
        sum += l.thickness;
    return sum;
}

std::size_t LayerStack::layer_at(double z) const
{
    double left = 0.0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const double right = left + layers[i].thickness;
        if (z >= left && z <= right)
            return i;
        left = right;
    }
    throw ConfigError("position " + std::to_string(z) + " nm lies outside the stack");
}

LayerStack LayerStack::reversed() const
{
    LayerStack r;
    r.layers.assign(layers.rbegin(), layers.rend());
    r.source_plane = total_length() - source_plane;
    r.n_left = n_right;
    r.n_right = n_left;
    return r;
}

double LayerStack::max_real_index() const
{
    double m = std::max(n_left, n_right);
    for (const auto &l : layers)
        m = std::max(m, l.index.real());
    return m;
}

bool LayerStack::lossless() const
{
    return std::all_of(layers.begin(), layers.end(), [](const Layer &l) { return l.index.imag() == 0.0; });
}

LayerStack build_stack(const CavityDesign &design, const EffectiveIndexProfile &profile)
{
    design.validate();
    const double t = design.slat_thickness;
    const double gap = design.grating_period - t;
    const Layer slat{t, profile.n_slat};
    const Layer base{gap, profile.n_base};

    LayerStack stack;
    stack.n_left = profile.n_exterior_left;
    stack.n_right = profile.n_exterior_right;
    stack.layers.reserve(2 * static_cast<std::size_t>(design.n_slats_input + design.n_slats_output) + 1);

    for (int i = 0; i < design.n_slats_input; ++i) {
        stack.layers.push_back(base);
        stack.layers.push_back(slat);
    }
    stack.source_plane = stack.total_length() + 0.5 * design.defect_width;
    stack.layers.push_back(Layer{design.defect_width, profile.n_base});
    for (int i = 0; i < design.n_slats_output; ++i) {
        stack.layers.push_back(slat);
        stack.layers.push_back(base);
    }
    return stack;
}

CavityDesign detune_design(const CavityDesign &design, double detuning_nm)
{
    if (!(std::abs(detuning_nm) <= kMaxDetuningNm))
        throw ConfigError("detuning must lie within +-10 nm");
    if (detuning_nm == 0.0)
        return design;
    const double lambda0 = target_resonance_nm(design.polarization_profile);
    const double scale = (lambda0 + detuning_nm) / lambda0;
    CavityDesign d = design;
    d.grating_period = design.grating_period * scale;
    d.slat_thickness = design.duty_cycle * d.grating_period;
    d.defect_width = kDefectToPeriodRatio * d.grating_period;
    return d;
}

} // namespace ncfcav
