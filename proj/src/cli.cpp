#include "ncfcav/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncfcav/calibrate.hpp"
#include "ncfcav/cqed.hpp"
#include "ncfcav/design.hpp"
#include "ncfcav/emitter.hpp"
#include "ncfcav/error.hpp"
#include "ncfcav/io.hpp"
#include "ncfcav/spectra.hpp"
#include "ncfcav/sweep.hpp"

namespace ncfcav
{
namespace
{
namespace fs = std::filesystem;
using io::Json;

constexpr const char *kVersion = "0.1.0";

struct CommonOptions
{
    std::string design_path;
    std::string out = "out";
    std::string profile = "both";
    int workers = 1;
    unsigned seed = 0;
    std::string calibration_path;
    bool lossless = false;
    double loss_scale = 1.0;
    std::optional<double> guided_fraction;
};

struct Context
{
    CavityDesign design;
    std::vector<Polarization> profiles;
    SweepSettings settings;
    fs::path out;
};

struct WindowArg
{
    double lo = 0.0;
    double hi = 0.0;
};

WindowArg parse_window(const std::string &text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("window must look like LO:HI (nm), got '" + text + "'");
    try {
        WindowArg w{std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
        if (!(w.lo > 0 && w.lo < w.hi))
            throw ConfigError("window needs 0 < LO < HI, got '" + text + "'");
        return w;
    } catch (const std::logic_error &) {
        throw ConfigError("window must look like LO:HI (nm), got '" + text + "'");
    }
}

std::vector<int> parse_range(const std::string &text)
{
    std::vector<int> parts;
    std::size_t start = 0;
    try {
        while (true) {
            const auto colon = text.find(':', start);
            parts.push_back(std::stoi(text.substr(start, colon - start)));
            if (colon == std::string::npos)
                break;
            start = colon + 1;
        }
    } catch (const std::logic_error &) {
        throw ConfigError("range must look like FIRST:LAST:STEP or N, got '" + text + "'");
    }
    if (parts.size() == 1)
        return {parts[0]};
    if (parts.size() != 3)
        throw ConfigError("range must look like FIRST:LAST:STEP or N, got '" + text + "'");
    return int_range(parts[0], parts[1], parts[2]);
}

Context make_context(const CommonOptions &o)
{
    Context c;
    c.design = o.design_path.empty() ? CavityDesign{} : io::load_design(o.design_path);
    if (o.profile == "both")
        c.profiles = {Polarization::YPol, Polarization::XPol};
    else
        c.profiles = {parse_polarization(o.profile)};
    if (o.workers < 1)
        throw ConfigError("--workers must be >= 1");
    if (!(o.loss_scale >= 0))
        throw ConfigError("--loss-scale must be >= 0");

    if (!o.calibration_path.empty()) {
        const io::CalibrationFile cal = io::load_calibration(o.calibration_path);
        c.settings.index = cal.index;
        c.settings.emitter = cal.emitter;
    }
    c.settings.index.slat_loss *= o.loss_scale;
    if (o.lossless)
        c.settings.index.slat_loss = 0.0;
    if (o.guided_fraction)
        c.settings.emitter.guided_fraction = *o.guided_fraction;
    c.settings.workers = o.workers;

    c.out = o.out;
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec || !fs::is_directory(c.out))
        throw ConfigError("cannot create output directory '" + c.out.string() + "'");
    return c;
}

std::string profile_name(Polarization p)
{
    return std::string(to_string(p));
}

// Files are collected first and written by one writer at the end.
class Outputs
{
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
    void add(const std::string &name, std::string text) { files_.push_back({name, std::move(text)}); }
    void flush() const
    {
        for (const auto &[name, text] : files_)
            io::write_text(dir_ / name, text);
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

Json provenance(const std::string &command, const std::vector<std::string> &args, const CommonOptions &o,
                const Context &c, double wall_seconds)
{
    Json j;
    j["tool"] = "ncfcav";
    j["version"] = kVersion;
    j["command"] = command;
    j["arguments"] = args;
    j["design"] = io::design_to_json(c.design);
    j["design_hash"] = io::design_hash(c.design);
    Json profiles = Json::array();
    for (auto p : c.profiles)
        profiles.push_back(profile_name(p));
    j["profiles"] = profiles;
    j["settings"] = io::sweep_settings_to_json(c.settings);
    j["workers"] = o.workers;
    j["seed"] = o.seed;
    Json build;
    build["compiler"] = __VERSION__;
    build["cxx_standard"] = static_cast<long>(__cplusplus);
    build["floating_point"] = "IEEE-754 double, no fast-math";
    j["build"] = build;
    // The only block that differs between otherwise identical runs.
    Json run;
    run["wall_time_s"] = io::number(wall_seconds);
    j["run"] = run;
    return j;
}

WavelengthWindow intersect(WavelengthWindow a, WindowArg b)
{
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

// ---- commands --------------------------------------------------------------

struct SpectrumOptions
{
    std::string window = "600:640";
    std::size_t samples = 4001;
    double kappa_sc_ghz = kTargetKappaScHz / kGHz;
};

int cmd_spectrum(const Context &c, const SpectrumOptions &o, Outputs &out)
{
    const WindowArg win = parse_window(o.window);
    if (o.samples < 2)
        throw ConfigError("--samples must be >= 2");
    int status = kExitOk;
    for (Polarization p : c.profiles) {
        const CavityDesign d = c.design.with_profile(p);
        const EffectiveIndexProfile profile = effective_indices(d, c.settings.index);
        const LayerStack stack = build_stack(d, profile);

        // Uniform coverage of the requested window plus a dense search of the stopband.
        auto reflect = [&](double l) { return sample_spectrum(stack, l).R; };
        std::vector<double> grid = adaptive_grid(reflect, win.lo, win.hi, o.samples, Extremum::Minimum);
        const WavelengthWindow focus = intersect(resonance_window(d, profile), win);
        if (focus.lo < focus.hi) {
            const auto dense = adaptive_grid(reflect, focus.lo, focus.hi, o.samples, Extremum::Minimum);
            grid.insert(grid.end(), dense.begin(), dense.end());
            std::sort(grid.begin(), grid.end());
            grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        }
        const Spectrum s = spectrum_on_grid(stack, grid);
        out.add("spectrum_" + profile_name(p) + ".csv", io::spectrum_csv(s));

        try {
            if (!(focus.lo < focus.hi))
                throw FitError(FitFailure::NoDipFound, "no dip found: window excludes the stopband");
            const ResonanceFit fit = fit_lorentzian(s, find_dip(s, focus.lo, focus.hi));
            const CouplingRegime regime = classify_regime(fit.kappa_hz, o.kappa_sc_ghz * kGHz);
            out.add("fit_" + profile_name(p) + ".json", io::dump(io::fit_report(fit, regime)));
            std::printf("%s: lambda0 = %s nm, kappa = %s GHz, R0 = %s, regime %s\n", profile_name(p).c_str(),
                        io::format_double(fit.lambda0).c_str(), io::format_double(fit.kappa_hz / kGHz).c_str(),
                        io::format_double(fit.r0).c_str(), std::string(to_string(regime.regime)).c_str());
        } catch (const FitError &e) {
            std::fprintf(stderr, "%s: fit failed (%s): %s\n", profile_name(p).c_str(), to_string(e.kind()), e.what());
            status = kExitNumerical;
        }
    }
    return status;
}

struct EmitOptions
{
    std::string window; // default: the resonance window
    std::size_t samples = 2001;
    bool oracle = false;
    double oracle_ppw = 40.0;
};

int cmd_emit(const Context &c, const EmitOptions &o, Outputs &out)
{
    if (o.samples < 2)
        throw ConfigError("--samples must be >= 2");
    int status = kExitOk;
    for (Polarization p : c.profiles) {
        const CavityDesign d = c.design.with_profile(p);
        const EffectiveIndexProfile profile = effective_indices(d, c.settings.index);
        const LayerStack stack = build_stack(d, profile);
        WavelengthWindow w = resonance_window(d, profile);
        if (!o.window.empty()) {
            const WindowArg a = parse_window(o.window);
            w = {a.lo, a.hi};
        }
        const auto samples = emission_spectrum(stack, w.lo, w.hi, o.samples, c.settings.emitter);
        out.add("emission_" + profile_name(p) + ".csv", io::emission_csv(samples));

        const Resonance res = locate_resonance(stack, w, c.settings.emitter, o.samples);
        Json r;
        r["lambda0_nm"] = io::number(res.lambda_nm);
        r["emission"] = io::emission_report(res.emission);
        r["guided_fraction"] = io::number(c.settings.emitter.guided_fraction);
        out.add("resonance_" + profile_name(p) + ".json", io::dump(r));
        std::printf("%s: resonance %s nm, purcell %s, eta_left %s\n", profile_name(p).c_str(),
                    io::format_double(res.lambda_nm).c_str(), io::format_double(res.emission.purcell).c_str(),
                    io::format_double(res.emission.eta_left).c_str());

        if (o.oracle) {
            OracleOptions opts;
            opts.points_per_wavelength = o.oracle_ppw;
            Json cases = Json::array();
            double worst_purcell = 0.0;
            double worst_eta = 0.0;
            const double half = 0.5 * (w.hi - w.lo);
            for (double l : {res.lambda_nm, w.lo, w.lo + 0.5 * half, w.hi - 0.5 * half, w.hi}) {
                const EmissionResult closed = emit(stack, l, c.settings.emitter);
                const OracleResult orc = helmholtz_oracle(stack, l, opts, c.settings.emitter);
                const double dp = std::abs(closed.purcell - orc.emission.purcell) / closed.purcell;
                const double de = std::abs(closed.eta_left - orc.emission.eta_left);
                worst_purcell = std::max(worst_purcell, dp);
                worst_eta = std::max(worst_eta, de);
                Json k;
                k["wavelength_nm"] = io::number(l);
                k["closed_form"] = io::emission_report(closed);
                k["oracle"] = io::emission_report(orc.emission);
                k["richardson_gap"] = io::number(orc.richardson_gap);
                k["relative_purcell_difference"] = io::number(dp);
                k["eta_left_difference"] = io::number(de);
                cases.push_back(k);
            }
            Json j;
            j["cases"] = cases;
            j["max_relative_purcell_difference"] = io::number(worst_purcell);
            j["max_eta_left_difference"] = io::number(worst_eta);
            j["tolerance"] = io::number(1e-3);
            j["agree"] = worst_purcell <= 1e-3 && worst_eta <= 1e-3;
            out.add("oracle_" + profile_name(p) + ".json", io::dump(j));
            std::printf("%s: oracle max |dP|/P %s, max |d eta| %s\n", profile_name(p).c_str(),
                        io::format_double(worst_purcell).c_str(), io::format_double(worst_eta).c_str());
            if (worst_purcell > 1e-3 || worst_eta > 1e-3) {
                std::fprintf(stderr, "%s: closed form and oracle disagree beyond 1e-3\n", profile_name(p).c_str());
                status = kExitInvariant;
            }
        }
    }
    return status;
}

struct SweepOptions
{
    std::string kind = "n_in";
    std::string range;
    std::optional<int> fixed;
};

int cmd_sweep(const Context &c, const SweepOptions &o, Outputs &out)
{
    SweepKind kind;
    std::string range = o.range;
    int fixed = 0;
    if (o.kind == "n_in") {
        kind = SweepKind::NIn;
        range = range.empty() ? "60:220:10" : range;
        fixed = o.fixed.value_or(400);
    } else if (o.kind == "n_out") {
        kind = SweepKind::NOut;
        range = range.empty() ? "200:480:10" : range;
        fixed = o.fixed.value_or(200);
    } else if (o.kind == "reflection") {
        kind = SweepKind::Reflection;
        range = range.empty() ? "100:400:10" : range;
        fixed = o.fixed.value_or(400);
    } else {
        throw ConfigError("--kind must be n_in, n_out or reflection");
    }
    const std::vector<int> values = parse_range(range);

    int status = kExitOk;
    for (Polarization p : c.profiles) {
        const CavityDesign d = c.design.with_profile(p);
        const SweepTable t = kind == SweepKind::NIn    ? sweep_n_in(d, values, fixed, c.settings)
                             : kind == SweepKind::NOut ? sweep_n_out(d, values, fixed, c.settings)
                                                       : sweep_reflection(d, values, fixed, c.settings);
        const std::string stem = "sweep_" + std::string(to_string(kind)) + "_" + profile_name(p);
        out.add(stem + ".csv", io::sweep_csv(t));
        out.add(stem + ".json", io::dump(io::sweep_sidecar(t)));
        std::size_t ok = 0;
        for (const auto &row : t.rows)
            ok += row.status == RowStatus::Ok;
        std::printf("%s: %zu/%zu rows ok\n", profile_name(p).c_str(), ok, t.rows.size());
        for (const auto &w : t.warnings)
            std::fprintf(stderr, "%s: warning: %s\n", profile_name(p).c_str(), w.c_str());
        if (ok == 0)
            status = kExitNumerical;
    }
    return status;
}

struct MetricsOptions
{
    std::string sweep_path;
    std::string n_in = "60:220:10";
    std::string n_out = "400";
    std::string reflection_range = "100:400:10";
    double gamma_ghz = kNvGammaHz / kGHz;
    std::optional<double> synthetic_kappa_sc_ghz;
    double noise = 0.0;
};

int cmd_metrics_synthetic(const MetricsOptions &o, unsigned seed, Outputs &out)
{
    const double ksc = *o.synthetic_kappa_sc_ghz * kGHz;
    if (!(ksc > 0) || o.noise < 0)
        throw ConfigError("--synthetic needs a positive rate and --noise >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<R0Point> points;
    Json pts = Json::array();
    for (int k = 50; k <= 400; k += 50) {
        const double kappa = k * kGHz;
        const double r0 = r0_model(kappa, ksc) * (1.0 + o.noise * gauss(rng));
        points.push_back({kappa, r0});
        pts.push_back(Json{{"kappa_ghz", io::number(kappa / kGHz)}, {"r0", io::number(r0)}});
    }
    const KappaScFit fit = fit_kappa_sc(points);
    constexpr double kLambda0 = 620.0;
    constexpr double kLeffUm = 25.0;
    Json j;
    j["points"] = pts;
    j["planted_kappa_sc_ghz"] = io::number(ksc / kGHz);
    j["noise"] = io::number(o.noise);
    j["kappa_sc_fit"] = io::kappa_sc_report(fit);
    j["lambda0_nm"] = io::number(kLambda0);
    j["l_eff_um"] = io::number(kLeffUm);
    j["q_sc"] = io::number(q_sc(kLambda0, fit.kappa_sc_hz));
    const double f = finesse_sc(kLeffUm, fit.kappa_sc_hz);
    j["finesse_sc"] = io::number(f);
    j["one_pass_loss_pct"] = io::number(100.0 * one_pass_loss(f));
    out.add("metrics_synthetic.json", io::dump(j));
    std::printf("synthetic: kappa_sc = %s GHz (planted %s)\n", io::format_double(fit.kappa_sc_hz / kGHz).c_str(),
                io::format_double(ksc / kGHz).c_str());
    return kExitOk;
}

int cmd_metrics(const Context &c, const MetricsOptions &o, unsigned seed, Outputs &out)
{
    if (o.synthetic_kappa_sc_ghz)
        return cmd_metrics_synthetic(o, seed, out);
    if (!o.sweep_path.empty() && c.profiles.size() != 1)
        throw ConfigError("--sweep needs a single --profile");
    if (!(o.gamma_ghz > 0))
        throw ConfigError("--gamma-ghz must be > 0");

    for (Polarization p : c.profiles) {
        const CavityDesign d = c.design.with_profile(p);
        DesignSpace space;
        space.base = d;
        space.n_in = parse_range(o.n_in);
        space.n_out = parse_range(o.n_out);
        space.settings = c.settings;
        space.gamma_hz = o.gamma_ghz * kGHz;

        // Scattering rate from a completed reflection sweep (read or run).
        std::vector<R0Point> points;
        if (!o.sweep_path.empty()) {
            for (const auto &row : io::read_sweep_csv(o.sweep_path))
                if (row.status == RowStatus::Ok && row.kappa_ghz > 0)
                    points.push_back({row.kappa_ghz * kGHz, row.r0});
        } else {
            const SweepTable t = sweep_reflection(d, parse_range(o.reflection_range), space.n_out.back(), c.settings);
            out.add("sweep_reflection_" + profile_name(p) + ".csv", io::sweep_csv(t));
            out.add("sweep_reflection_" + profile_name(p) + ".json", io::dump(io::sweep_sidecar(t)));
            for (const auto &row : t.rows)
                if (row.status == RowStatus::Ok)
                    points.push_back({row.kappa_ghz * kGHz, row.r0});
        }
        if (points.empty())
            throw FitError(FitFailure::NoDipFound, "no fitted reflection rows to estimate kappa_sc from");
        const KappaScFit ksc = fit_kappa_sc(points);
        space.kappa_sc_hz = ksc.kappa_sc_hz;

        const Optimum opt = optimize_one_sided(space);
        SweepTable grid;
        grid.kind = SweepKind::NIn;
        grid.design = d;
        grid.settings = c.settings;
        grid.rows = opt.grid;
        out.add("optimum_grid_" + profile_name(p) + ".csv", io::sweep_csv(grid));

        Json j;
        j["profile"] = profile_name(p);
        j["optimum_design"] = io::design_to_json(opt.design);
        j["kappa_sc_fit"] = io::kappa_sc_report(ksc);
        j["report"] = io::cqed_report(opt.report);
        out.add("metrics_" + profile_name(p) + ".json", io::dump(j));
        std::printf("%s: optimum N_in=%d N_out=%d eta=%s purcell=%s kappa=%s GHz kappa_sc=%s GHz Q_sc=%s F_sc=%s "
                    "L=%s%% 2g0=%s GHz\n",
                    profile_name(p).c_str(), opt.design.n_slats_input, opt.design.n_slats_output,
                    io::format_double(opt.report.eta).c_str(), io::format_double(opt.report.purcell).c_str(),
                    io::format_double(opt.report.kappa_hz / kGHz).c_str(),
                    io::format_double(opt.report.kappa_sc_hz / kGHz).c_str(), io::format_double(opt.report.q_sc).c_str(),
                    io::format_double(opt.report.finesse_sc).c_str(),
                    io::format_double(100.0 * opt.report.one_pass_loss).c_str(),
                    io::format_double(2.0 * opt.report.g0_hz / kGHz).c_str());
    }
    return kExitOk;
}

struct CalibrateOptions
{
    double target_ghz = kTargetKappaScHz / kGHz;
    double tolerance = 0.02;
};

int cmd_calibrate(const Context &c, const CalibrateOptions &o, Outputs &out)
{
    // Loss is calibrated on one profile; x-pol follows from the contrast ratio.
    const Polarization p = c.profiles.size() == 1 ? c.profiles.front() : Polarization::YPol;
    const CavityDesign d = c.design.with_profile(p);
    LossCalibrationOptions lo;
    lo.tolerance = o.tolerance;
    LossCalibration loss = calibrate_slat_loss(d, o.target_ghz * kGHz, c.settings.index, lo, c.settings.workers);
    if (p == Polarization::XPol)
        loss.slat_loss /= c.settings.index.xpol_contrast_ratio * c.settings.index.xpol_contrast_ratio;

    io::CalibrationFile cal;
    cal.index = c.settings.index;
    cal.index.slat_loss = loss.slat_loss;
    const GuidedFractionCalibration guided = calibrate_guided_fraction(d, cal.index);
    cal.emitter.guided_fraction = guided.guided_fraction;
    out.add("calibration.json", io::dump(io::calibration_to_json(cal, loss, guided)));
    std::printf("slat_loss = %.12g (kappa_sc %s GHz after %d steps), guided_fraction = %.12g\n", loss.slat_loss,
                io::format_double(loss.kappa_sc_hz / kGHz).c_str(), loss.iterations, guided.guided_fraction);
    return kExitOk;
}

void add_common(CLI::App *cmd, CommonOptions &o)
{
    cmd->add_option("--design", o.design_path, "Design JSON file (default: built-in default design)");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--profile", o.profile, "ypol, xpol or both")
        ->check(CLI::IsMember({"ypol", "xpol", "both"}))
        ->capture_default_str();
    cmd->add_option("--workers", o.workers, "Worker threads")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Random seed (noise-injection modes)")->capture_default_str();
    cmd->add_option("--calibration", o.calibration_path, "Calibration JSON written by `calibrate`");
    cmd->add_flag("--lossless", o.lossless, "Zero the slat loss");
    cmd->add_option("--loss-scale", o.loss_scale, "Multiply the slat loss")->capture_default_str();
    cmd->add_option("--guided-fraction", o.guided_fraction, "Override the emitter guided fraction");
}

} // namespace

int run_cli(int argc, char **argv)
{
    CLI::App app{"ncfcav: one-sided nanofiber grating cavity simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOptions common;
    SpectrumOptions spectrum_o;
    EmitOptions emit_o;
    SweepOptions sweep_o;
    MetricsOptions metrics_o;
    CalibrateOptions calibrate_o;

    auto *spectrum = app.add_subcommand("spectrum", "Reflection spectra and Lorentzian dip fits");
    add_common(spectrum, common);
    spectrum->add_option("--window", spectrum_o.window, "LO:HI in nm")->capture_default_str();
    spectrum->add_option("--samples", spectrum_o.samples, "Uniform samples")->capture_default_str();
    spectrum->add_option("--kappa-sc-ghz", spectrum_o.kappa_sc_ghz, "Scattering rate for regime labels")
        ->capture_default_str();

    auto *emit_cmd = app.add_subcommand("emit", "Purcell factor and channeling efficiency spectra");
    add_common(emit_cmd, common);
    emit_cmd->add_option("--window", emit_o.window, "LO:HI in nm (default: stopband centre)");
    emit_cmd->add_option("--samples", emit_o.samples, "Uniform samples")->capture_default_str();
    emit_cmd->add_flag("--oracle", emit_o.oracle, "Cross-check against the finite-difference oracle");
    emit_cmd->add_option("--oracle-ppw", emit_o.oracle_ppw, "Oracle points per wavelength")->capture_default_str();

    auto *sweep = app.add_subcommand("sweep", "Slat-count sweeps");
    add_common(sweep, common);
    sweep->add_option("--kind", sweep_o.kind, "n_in, n_out or reflection")->capture_default_str();
    sweep->add_option("--range", sweep_o.range, "FIRST:LAST:STEP of the swept count");
    sweep->add_option("--fixed", sweep_o.fixed, "The count held fixed");

    auto *metrics = app.add_subcommand("metrics", "Cavity-QED report at the one-sided optimum");
    add_common(metrics, common);
    metrics->add_option("--sweep", metrics_o.sweep_path, "Completed reflection sweep CSV for the kappa_sc fit");
    metrics->add_option("--n-in", metrics_o.n_in, "N_in grid")->capture_default_str();
    metrics->add_option("--n-out", metrics_o.n_out, "N_out grid")->capture_default_str();
    metrics->add_option("--reflection-range", metrics_o.reflection_range, "N_in range of the kappa_sc sweep")
        ->capture_default_str();
    metrics->add_option("--gamma-ghz", metrics_o.gamma_ghz, "Emitter free decay rate")->capture_default_str();
    metrics->add_option("--synthetic", metrics_o.synthetic_kappa_sc_ghz,
                        "Fit synthetic R0 points planted with this kappa_sc (GHz)");
    metrics->add_option("--noise", metrics_o.noise, "Relative Gaussian noise on synthetic R0")->capture_default_str();

    auto *calibrate = app.add_subcommand("calibrate", "Calibrate slat loss and guided fraction");
    add_common(calibrate, common);
    calibrate->add_option("--target-ghz", calibrate_o.target_ghz, "Target kappa_sc")->capture_default_str();
    calibrate->add_option("--tolerance", calibrate_o.tolerance, "Relative tolerance")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Context ctx = make_context(common);
        Outputs out(ctx.out);
        std::string name;
        int status = kExitOk;
        if (*spectrum) {
            name = "spectrum";
            status = cmd_spectrum(ctx, spectrum_o, out);
        } else if (*emit_cmd) {
            name = "emit";
            status = cmd_emit(ctx, emit_o, out);
        } else if (*sweep) {
            name = "sweep";
            status = cmd_sweep(ctx, sweep_o, out);
        } else if (*metrics) {
            name = "metrics";
            status = cmd_metrics(ctx, metrics_o, common.seed, out);
        } else {
            name = "calibrate";
            status = cmd_calibrate(ctx, calibrate_o, out);
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.add("provenance.json", io::dump(provenance(name, args, common, ctx, wall)));
        out.flush();
        return status;
    } catch (const ConfigError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const FitError &e) {
        std::fprintf(stderr, "fit failure (%s): %s\n", to_string(e.kind()), e.what());
        return kExitNumerical;
    } catch (const NumericalError &e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInvariant;
    }
}

} // namespace ncfcav
