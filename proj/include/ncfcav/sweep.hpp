#pragma once

// Design-space scans: N_out and N_in emission sweeps, reflection sweeps with
// per-row Lorentzian fits and a table-level kappa_sc fit, and exhaustive
// one-sided optimization. Grid points run on a bounded worker pool; rows are
// assembled in grid order regardless of completion order.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncfcav/cqed.hpp"
#include "ncfcav/design.hpp"
#include "ncfcav/emitter.hpp"
#include "ncfcav/spectra.hpp"

namespace ncfcav
{
struct SweepSettings
{
    IndexModel index = IndexModel::calibrated();
    EmitterModel emitter = EmitterModel::calibrated();
    std::size_t spectrum_samples = 4001; // uniform part of each reflection spectrum
    std::size_t peak_samples = 2001;     // uniform part of each resonance search
    int workers = 1;

    bool operator==(const SweepSettings &) const = default;
};

enum class RowStatus
{
    Ok,
    NoDipFound,
    NotConverged,
    GridLimited,
    NumericalFailure,
};

std::string_view to_string(RowStatus s);

struct SweepRow
{
    int n_in = 0;
    int n_out = 0;
    double detuning_nm = 0.0;
    double lambda0_nm = 0.0;
    double kappa_ghz = 0.0; // 0 when no dip was fitted
    double r0 = 0.0;
    double eta = 0.0;
    double purcell = 0.0;
    double eta_loss = 0.0;
    std::optional<Regime> regime;
    RowStatus status = RowStatus::Ok;
    std::string message;
};

enum class SweepKind
{
    NIn,
    NOut,
    Reflection,
};

std::string_view to_string(SweepKind k);

struct SweepTable
{
    SweepKind kind = SweepKind::NIn;
    CavityDesign design;   // base design; slat counts are overridden per row
    SweepSettings settings;
    int fixed_count = 0;   // the slat count held fixed
    std::vector<SweepRow> rows;
    std::optional<KappaScFit> kappa_sc; // reflection sweeps only
    std::vector<std::string> warnings;
};

// first, first + step, ..., <= last
std::vector<int> int_range(int first, int last, int step);

struct WavelengthWindow
{
    double lo;
    double hi;
};

// First-order Bragg gap of the infinite grating (|half trace| > 1).
WavelengthWindow bragg_stopband(const CavityDesign &design, const EffectiveIndexProfile &profile);

// Central 80% of the stopband: where resonances are searched and fitted.
WavelengthWindow resonance_window(const CavityDesign &design, const EffectiveIndexProfile &profile);

struct Resonance
{
    double lambda_nm = 0.0;
    EmissionResult emission;
};

// Wavelength of maximum Purcell factor inside [window.lo, window.hi].
Resonance locate_resonance(const LayerStack &stack, WavelengthWindow window, const EmitterModel &model,
                           std::size_t samples);

// Single design points (the sweep rows, computed without any sweep state).
SweepRow evaluate_emission(const CavityDesign &design, const SweepSettings &settings);
SweepRow evaluate_reflection(const CavityDesign &design, const SweepSettings &settings);

SweepTable sweep_n_out(const CavityDesign &design, std::span<const int> n_out_values, int fixed_n_in,
                       const SweepSettings &settings = {});
SweepTable sweep_n_in(const CavityDesign &design, std::span<const int> n_in_values, int fixed_n_out,
                      const SweepSettings &settings = {});
// Per row: spectrum, dip fit, emission at the fitted lambda0. Then kappa_sc
// is fitted over the Ok rows and every Ok row classified against it.
SweepTable sweep_reflection(const CavityDesign &design, std::span<const int> n_in_values, int fixed_n_out,
                            const SweepSettings &settings = {});

struct DesignSpace
{
    CavityDesign base;
    std::vector<int> n_in;
    std::vector<int> n_out;
    std::vector<double> detunings{0.0}; // nm
    SweepSettings settings;
    // Scattering rate for the report; fitted from a reflection sweep at the
    // optimum's N_out (N_in 100..400 step 20) when absent.
    std::optional<double> kappa_sc_hz;
    double gamma_hz = kNvGammaHz;
};

struct Optimum
{
    CavityDesign design;
    SweepRow row;
    CqedReport report;
    std::vector<SweepRow> grid; // every evaluated point, grid order
};

// Exhaustive search for maximum eta; ties go to the smaller N_in + N_out.
Optimum optimize_one_sided(const DesignSpace &space);

// Runs task(i) for i in [0, n) on up to `workers` threads.
void run_indexed(std::size_t n, int workers, const std::function<void(std::size_t)> &task);

} // namespace ncfcav
