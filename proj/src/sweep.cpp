#include "ncfcav/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/tools/minima.hpp>

#include "ncfcav/error.hpp"

namespace ncfcav
{
std::string_view to_string(RowStatus s)
{
    switch (s) {
    case RowStatus::Ok:
        return "ok";
    case RowStatus::NoDipFound:
        return "no_dip";
    case RowStatus::NotConverged:
        return "not_converged";
    case RowStatus::GridLimited:
        return "grid_limited";
    case RowStatus::NumericalFailure:
        return "numerical_failure";
    }
    return "unknown";
}

std::string_view to_string(SweepKind k)
{
    switch (k) {
    case SweepKind::NIn:
        return "n_in";
    case SweepKind::NOut:
        return "n_out";
    case SweepKind::Reflection:
        return "reflection";
    }
    return "unknown";
}

std::vector<int> int_range(int first, int last, int step)
{
    if (step <= 0)
        throw ConfigError("range step must be > 0");
    if (first > last)
        throw ConfigError("range is empty");
    std::vector<int> out;
    for (int v = first; v <= last; v += step)
        out.push_back(v);
    return out;
}

void run_indexed(std::size_t n, int workers, const std::function<void(std::size_t)> &task)
{
    const std::size_t pool = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (pool <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> threads;
        threads.reserve(pool);
        for (std::size_t w = 0; w < pool; ++w)
            threads.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
    }
    if (failure)
        std::rethrow_exception(failure);
}

namespace
{
// cos(K Lambda) of the infinite two-layer grating.
double half_trace(const CavityDesign &d, const EffectiveIndexProfile &p, double lambda_nm)
{
    const double k = 2.0 * kPi / lambda_nm;
    const double n1 = p.n_slat.real();
    const double n2 = p.n_base.real();
    const double f1 = k * n1 * d.slat_thickness;
    const double f2 = k * n2 * (d.grating_period - d.slat_thickness);
    return std::cos(f1) * std::cos(f2) - 0.5 * (n1 / n2 + n2 / n1) * std::sin(f1) * std::sin(f2);
}

double bisect_edge(const std::function<double(double)> &g, double inside, double outside)
{
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (inside + outside);
        (g(mid) < -1.0 ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
}

RowStatus status_of(FitFailure kind)
{
    switch (kind) {
    case FitFailure::NoDipFound:
        return RowStatus::NoDipFound;
    case FitFailure::GridLimited:
        return RowStatus::GridLimited;
    case FitFailure::NotConverged:
    case FitFailure::Unreachable:
        return RowStatus::NotConverged;
    }
    return RowStatus::NumericalFailure;
}

// Runs `body` and turns numerical failures into a flagged row.
template <typename Body>
SweepRow guarded(const CavityDesign &design, double detuning, Body &&body)
{
    SweepRow row;
    row.n_in = design.n_slats_input;
    row.n_out = design.n_slats_output;
    row.detuning_nm = detuning;
    try {
        body(row);
    } catch (const FitError &e) {
        row.status = status_of(e.kind());
        row.message = e.what();
    } catch (const NumericalError &e) {
        row.status = RowStatus::NumericalFailure;
        row.message = e.what();
    }
    return row;
}

SweepTable run_sweep(SweepKind kind, const CavityDesign &design, std::span<const int> values, int fixed,
                     const SweepSettings &settings)
{
    if (values.empty())
        throw ConfigError("sweep range is empty");
    if (!std::is_sorted(values.begin(), values.end()))
        throw ConfigError("sweep values must be ascending");
    design.validate();

    SweepTable table;
    table.kind = kind;
    table.design = design;
    table.settings = settings;
    table.fixed_count = fixed;
    table.rows.resize(values.size());
    run_indexed(values.size(), settings.workers, [&](std::size_t i) {
        const CavityDesign d = kind == SweepKind::NOut ? design.with_slats(fixed, values[i])
                                                       : design.with_slats(values[i], fixed);
        table.rows[i] = kind == SweepKind::Reflection ? evaluate_reflection(d, settings) : evaluate_emission(d, settings);
    });
    return table;
}

} // namespace

WavelengthWindow bragg_stopband(const CavityDesign &design, const EffectiveIndexProfile &profile)
{
    const double center = 2.0 * profile.mean_index(design.duty_cycle) * design.grating_period;
    auto g = [&](double l) { return half_trace(design, profile, l); };
    // The gap centre sits near the Bragg wavelength; search the deepest point nearby.
    const auto [c, gc] = boost::math::tools::brent_find_minima(g, 0.9 * center, 1.1 * center, 40);
    if (!(gc < -1.0))
        throw NumericalError("grating has no first-order stopband near the Bragg wavelength");
    auto edge = [&](double dir) {
        double outside = c;
        const double step = 1e-3 * c;
        for (int i = 0; i < 1000; ++i) {
            outside += dir * step;
            if (g(outside) >= -1.0)
                return bisect_edge(g, c, outside);
        }
        throw NumericalError("stopband edge not found");
    };
    return {edge(-1.0), edge(+1.0)};
}

WavelengthWindow resonance_window(const CavityDesign &design, const EffectiveIndexProfile &profile)
{
    const WavelengthWindow band = bragg_stopband(design, profile);
    const double margin = 0.1 * (band.hi - band.lo);
    return {band.lo + margin, band.hi - margin};
}

Resonance locate_resonance(const LayerStack &stack, WavelengthWindow window, const EmitterModel &model,
                           std::size_t samples)
{
    auto purcell = [&](double l) { return emit(stack, l, model).purcell; };
    const auto grid = adaptive_grid(purcell, window.lo, window.hi, samples, Extremum::Maximum);
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = purcell(grid[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    double lambda = grid[best];
    if (best > 0 && best + 1 < grid.size()) {
        const auto [x, fx] = boost::math::tools::brent_find_minima([&](double l) { return -purcell(l); },
                                                                   grid[best - 1], grid[best + 1], 52);
        if (-fx > best_value)
            lambda = x;
    }
    return {lambda, emit(stack, lambda, model)};
}

SweepRow evaluate_emission(const CavityDesign &design, const SweepSettings &settings)
{
    return guarded(design, 0.0, [&](SweepRow &row) {
        const EffectiveIndexProfile profile = effective_indices(design, settings.index);
        const LayerStack stack = build_stack(design, profile);
        const Resonance res =
            locate_resonance(stack, resonance_window(design, profile), settings.emitter, settings.peak_samples);
        row.lambda0_nm = res.lambda_nm;
        row.eta = res.emission.eta_left;
        row.purcell = res.emission.purcell;
        row.eta_loss = res.emission.eta_loss;
    });
}

SweepRow evaluate_reflection(const CavityDesign &design, const SweepSettings &settings)
{
    return guarded(design, 0.0, [&](SweepRow &row) {
        const EffectiveIndexProfile profile = effective_indices(design, settings.index);
        const LayerStack stack = build_stack(design, profile);
        const WavelengthWindow w = resonance_window(design, profile);
        const Spectrum spectrum = reflection_spectrum(stack, w.lo, w.hi, settings.spectrum_samples);
        const ResonanceFit fit = fit_lorentzian(spectrum, find_dip(spectrum, w.lo, w.hi));
        row.lambda0_nm = fit.lambda0;
        row.kappa_ghz = fit.kappa_hz / kGHz;
        row.r0 = fit.r0;
        const EmissionResult e = emit(stack, fit.lambda0, settings.emitter);
        row.eta = e.eta_left;
        row.purcell = e.purcell;
        row.eta_loss = e.eta_loss;
    });
}

SweepTable sweep_n_out(const CavityDesign &design, std::span<const int> n_out_values, int fixed_n_in,
                       const SweepSettings &settings)
{
    return run_sweep(SweepKind::NOut, design, n_out_values, fixed_n_in, settings);
}

SweepTable sweep_n_in(const CavityDesign &design, std::span<const int> n_in_values, int fixed_n_out,
                      const SweepSettings &settings)
{
    return run_sweep(SweepKind::NIn, design, n_in_values, fixed_n_out, settings);
}

SweepTable sweep_reflection(const CavityDesign &design, std::span<const int> n_in_values, int fixed_n_out,
                            const SweepSettings &settings)
{
    SweepTable table = run_sweep(SweepKind::Reflection, design, n_in_values, fixed_n_out, settings);
    std::vector<R0Point> points;
    for (const auto &row : table.rows)
        if (row.status == RowStatus::Ok)
            points.push_back({row.kappa_ghz * kGHz, row.r0});
    if (points.empty()) {
        table.warnings.push_back("no fitted rows: kappa_sc not estimated");
        return table;
    }
    table.kappa_sc = fit_kappa_sc(points);
    if (table.kappa_sc->poorly_constrained)
        table.warnings.push_back("kappa_sc poorly constrained: rows do not span both coupling regimes");
    if (table.kappa_sc->kappa_sc_hz > 0)
        for (auto &row : table.rows)
            if (row.status == RowStatus::Ok)
                row.regime = classify_regime(row.kappa_ghz * kGHz, table.kappa_sc->kappa_sc_hz).regime;
    return table;
}

Optimum optimize_one_sided(const DesignSpace &space)
{
    if (space.n_in.empty() || space.n_out.empty() || space.detunings.empty())
        throw ConfigError("design space is empty");

    struct Point
    {
        int n_in;
        int n_out;
        double detuning;
    };
    std::vector<Point> points;
    for (double det : space.detunings)
        for (int n_out : space.n_out)
            for (int n_in : space.n_in)
                points.push_back({n_in, n_out, det});

    std::vector<SweepRow> grid(points.size());
    run_indexed(points.size(), space.settings.workers, [&](std::size_t i) {
        const CavityDesign d = detune_design(space.base, points[i].detuning).with_slats(points[i].n_in, points[i].n_out);
        grid[i] = evaluate_emission(d, space.settings);
        grid[i].detuning_nm = points[i].detuning;
    });

    std::size_t best = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].status != RowStatus::Ok)
            continue;
        if (best == grid.size() || grid[i].eta > grid[best].eta ||
            (grid[i].eta == grid[best].eta && grid[i].n_in + grid[i].n_out < grid[best].n_in + grid[best].n_out))
            best = i;
    }
    if (best == grid.size())
        throw NumericalError("no design point in the space produced a resonance");

    Optimum out;
    out.row = grid[best];
    out.design = detune_design(space.base, out.row.detuning_nm).with_slats(out.row.n_in, out.row.n_out);
    out.grid = std::move(grid);

    const SweepRow refl = evaluate_reflection(out.design, space.settings);
    if (refl.status != RowStatus::Ok)
        throw FitError(FitFailure::NotConverged, "optimum has no fittable reflection dip: " + refl.message);

    double kappa_sc = 0.0;
    if (space.kappa_sc_hz) {
        kappa_sc = *space.kappa_sc_hz;
    } else {
        const auto family = int_range(100, 400, 20);
        const SweepTable t = sweep_reflection(out.design, family, out.design.n_slats_output, space.settings);
        if (!t.kappa_sc)
            throw FitError(FitFailure::NotConverged, "kappa_sc could not be fitted for the report");
        kappa_sc = t.kappa_sc->kappa_sc_hz;
    }

    const LayerStack stack = build_stack(out.design, effective_indices(out.design, space.settings.index));
    CqedInputs in;
    in.lambda0_nm = refl.lambda0_nm;
    in.kappa_hz = refl.kappa_ghz * kGHz;
    in.kappa_sc_hz = kappa_sc;
    in.l_eff_um = effective_length(stack, out.row.lambda0_nm) * 1e-3;
    in.purcell = out.row.purcell;
    in.eta = out.row.eta;
    in.gamma_hz = space.gamma_hz;
    out.report = make_report(in);
    return out;
}

} // namespace ncfcav
