#include "ncfcav/calibrate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ncfcav/error.hpp"

namespace ncfcav
{
KappaScFit family_kappa_sc(const CavityDesign &design, const IndexModel &model,
                           const LossCalibrationOptions &options, int workers)
{
    SweepSettings settings;
    settings.index = model;
    settings.emitter = EmitterModel::bare();
    settings.workers = workers;
    const SweepTable t = sweep_reflection(design, options.n_in, options.n_out, settings);
    std::size_t ok = 0;
    for (const auto &row : t.rows)
        ok += row.status == RowStatus::Ok;
    if (!t.kappa_sc || ok < 3)
        throw FitError(FitFailure::NotConverged, "too few fitted dips in the calibration family");
    return *t.kappa_sc;
}

LossCalibration calibrate_slat_loss(const CavityDesign &design, double target_kappa_sc_hz, const IndexModel &index,
                                    const LossCalibrationOptions &options, int workers)
{
    if (!(target_kappa_sc_hz > 0))
        throw ConfigError("calibration target must be > 0");
    if (!(options.im_min > 0 && options.im_min < options.im_max))
        throw ConfigError("calibration bracket must satisfy 0 < im_min < im_max");

    IndexModel model = index;
    // Unfittable families at the lossy end count as "too lossy".
    auto evaluate = [&](double im) -> double {
        model.slat_loss = im;
        try {
            return family_kappa_sc(design, model, options, workers).kappa_sc_hz;
        } catch (const NumericalError &) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double lo = std::log(options.im_min);
    double hi = std::log(options.im_max);
    double k_lo = std::nan("");
    double k_hi = std::nan("");
    LossCalibration out;
    out.target_hz = target_kappa_sc_hz;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double k = evaluate(std::exp(mid));
        out.iterations = it;
        if (std::abs(k - target_kappa_sc_hz) <= options.tolerance * target_kappa_sc_hz) {
            out.slat_loss = std::exp(mid);
            out.kappa_sc_hz = k;
            return out;
        }
        if (k < target_kappa_sc_hz) {
            lo = mid;
            k_lo = k;
        } else {
            hi = mid;
            k_hi = k;
        }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "kappa_sc target %.6g GHz unreachable for Im(n_slat) in [%.3g, %.3g]; final bracket [%.6g, %.6g] "
                  "gives [%.6g, %.6g] GHz",
                  target_kappa_sc_hz / kGHz, options.im_min, options.im_max, std::exp(lo), std::exp(hi), k_lo / kGHz,
                  k_hi / kGHz);
    throw FitError(FitFailure::Unreachable, buf);
}

GuidedFractionCalibration calibrate_guided_fraction(const CavityDesign &design, const IndexModel &index, int n_low,
                                                    int n_high, int n_out)
{
    if (!(n_low < n_high))
        throw ConfigError("n_low must be below n_high");

    // The resonance does not move with the guided fraction: locate it once
    // per design in the bare model and rescale the powers.
    struct Powers
    {
        double total;
        double left;
    };
    auto powers = [&](int n_in) {
        const CavityDesign d = design.with_slats(n_in, n_out);
        const EffectiveIndexProfile profile = effective_indices(d, index);
        const LayerStack stack = build_stack(d, profile);
        const SweepSettings defaults;
        const Resonance r =
            locate_resonance(stack, resonance_window(d, profile), EmitterModel::bare(), defaults.peak_samples);
        return Powers{r.emission.p_total, r.emission.p_left};
    };
    const Powers a = powers(n_low);
    const Powers b = powers(n_high);
    auto eta = [](const Powers &p, double beta) { return beta * p.left / (beta * p.total + 1.0 - beta); };
    auto gap = [&](double beta) { return eta(b, beta) - eta(a, beta); };

    double lo = 1e-6;
    double hi = 1.0;
    if (!(gap(lo) > 0 && gap(hi) < 0))
        throw FitError(FitFailure::Unreachable, "no guided fraction in (0, 1] balances eta between the two designs");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0 ? lo : hi) = mid;
    }
    GuidedFractionCalibration out;
    out.guided_fraction = 0.5 * (lo + hi);
    out.n_low = n_low;
    out.n_high = n_high;
    out.eta_low = eta(a, out.guided_fraction);
    out.eta_high = eta(b, out.guided_fraction);
    return out;
}

} // namespace ncfcav
