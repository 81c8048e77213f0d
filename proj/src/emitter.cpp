#include "ncfcav/emitter.hpp"

#include <algorithm>
#include <cmath>

#include "ncfcav/calibration.hpp"
#include "ncfcav/error.hpp"

namespace ncfcav
{
EmitterModel EmitterModel::calibrated()
{
    return {calibration::kGuidedFraction};
}

EmissionResult combine_powers(double p_guided_total, double p_left, double p_right, const EmitterModel &model)
{
    const double beta = model.guided_fraction;
    if (!(beta > 0.0 && beta <= 1.0))
        throw ConfigError("guided_fraction must lie in (0, 1]");
    EmissionResult out;
    out.p_radiated = 1.0 - beta;
    out.p_total = beta * p_guided_total + out.p_radiated;
    out.p_left = beta * p_left;
    out.p_right = beta * p_right;
    out.purcell = out.p_total;
    if (out.p_total > 0) {
        out.eta_left = out.p_left / out.p_total;
        out.eta_right = out.p_right / out.p_total;
    }
    out.eta_loss = 1.0 - out.eta_left - out.eta_right;
    return out;
}

EmissionResult emit_from_coefficients(const MirrorCoefficients &mc, const EmitterModel &model)
{
    const Complex r_l = mc.r_left_at_source();
    const Complex r_r = mc.r_right_at_source();
    const Complex d = 1.0 - r_l * r_r;
    if (std::abs(d) < 1e-12)
        throw NumericalError("lossless perfectly reflecting resonance: emitted power diverges");

    const double p_guided = ((1.0 + r_l) * (1.0 + r_r) / d).real();
    const Complex a_left = mc.t_left_at_source() * (1.0 + r_r) / d;
    const Complex a_right = mc.t_right_at_source() * (1.0 + r_l) / d;
    const double n_def = mc.n_defect.real();
    const double p_left = mc.n_exterior_left * std::norm(a_left) / (2.0 * n_def);
    const double p_right = mc.n_exterior_right * std::norm(a_right) / (2.0 * n_def);
    return combine_powers(p_guided, p_left, p_right, model);
}

EmissionResult emit(const LayerStack &stack, double lambda_nm, const EmitterModel &model)
{
    return emit_from_coefficients(mirror_coefficients(stack, stack.source_plane, lambda_nm), model);
}

std::vector<EmissionSample> emission_spectrum(const LayerStack &stack, double lambda_min, double lambda_max,
                                              std::size_t n_samples, const EmitterModel &model)
{
    const auto grid = adaptive_grid([&](double l) { return emit(stack, l, model).purcell; }, lambda_min,
                                    lambda_max, n_samples, Extremum::Maximum);
    std::vector<EmissionSample> out;
    out.reserve(grid.size());
    for (double l : grid)
        out.push_back({l, emit(stack, l, model)});
    return out;
}

std::vector<IntensitySample> dipole_intensity_profile(const LayerStack &stack, double lambda_nm,
                                                      int points_per_layer)
{
    const MirrorCoefficients mc = mirror_coefficients(stack, stack.source_plane, lambda_nm);
    const Complex r_l = mc.r_left_at_source();
    const Complex r_r = mc.r_right_at_source();
    const Complex d = 1.0 - r_l * r_r;
    const Complex fwd = (1.0 + r_l) / d; // right-going amplitude leaving the source
    const Complex bwd = (1.0 + r_r) / d; // left-going amplitude leaving the source
    const Complex n = mc.n_defect;

    // Right of the source: (fwd, r_R fwd); left of it: (r_L bwd, bwd).
    const FieldState right{fwd + r_r * fwd, n * (fwd - r_r * fwd)};
    const FieldState left{r_l * bwd + bwd, n * (r_l * bwd - bwd)};
    auto lhs = propagate_intensity(stack, lambda_nm, stack.source_plane, left, Side::Left, points_per_layer);
    auto rhs = propagate_intensity(stack, lambda_nm, stack.source_plane, right, Side::Right, points_per_layer);

    // The source-plane sample appears at the end of lhs and the start of rhs.
    lhs.insert(lhs.end(), rhs.begin() + 1, rhs.end());
    double peak = 0.0;
    for (const auto &s : lhs)
        peak = std::max(peak, s.intensity);
    if (peak > 0)
        for (auto &s : lhs)
            s.intensity /= peak;
    return lhs;
}

double effective_length(const LayerStack &stack, double lambda_nm)
{
    const auto prof = dipole_intensity_profile(stack, lambda_nm, 16);
    const auto peak = std::max_element(prof.begin(), prof.end(),
                                       [](const auto &a, const auto &b) { return a.intensity < b.intensity; });
    if (peak->z <= prof.front().z || peak->z >= prof.back().z)
        throw NumericalError("no confined mode: intensity peaks at the stack edge");

    double integral = 0.0;
    for (std::size_t i = 1; i < prof.size(); ++i)
        integral += 0.5 * (prof[i].intensity + prof[i - 1].intensity) * (prof[i].z - prof[i - 1].z);
    return integral; // profile max is 1
}

} // namespace ncfcav
