#include "ncfcav/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "ncfcav/error.hpp"

namespace ncfcav
{
const char *to_string(FitFailure kind)
{
    switch (kind) {
    case FitFailure::NoDipFound:
        return "no dip found";
    case FitFailure::NotConverged:
        return "fit did not converge";
    case FitFailure::GridLimited:
        return "fit is grid-limited";
    case FitFailure::Unreachable:
        return "target unreachable";
    }
    return "unknown";
}

std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::Over:
        return "over";
    case Regime::Critical:
        return "critical";
    case Regime::Under:
        return "under";
    }
    return "unknown";
}

namespace
{
double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0)
        m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
}

void check_sizes(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw ConfigError("wavelength and reflectance arrays differ in length");
    if (x.size() < 3)
        throw ConfigError("spectrum needs at least 3 samples");
}

// Interpolated crossing of `level` between samples a and b.
double crossing(double xa, double ya, double xb, double yb, double level)
{
    if (ya == yb)
        return 0.5 * (xa + xb);
    return xa + (level - ya) * (xb - xa) / (yb - ya);
}

} // namespace

DipGuess find_dip(std::span<const double> x, std::span<const double> y, double window_min, double window_max)
{
    check_sizes(x, y);
    if (!(window_min < window_max) || window_min < x.front() || window_max > x.back())
        throw ConfigError("dip window must lie inside the spectrum range");

    const auto lo = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), window_min) - x.begin());
    const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), window_max) - x.begin());
    if (hi - lo < 3)
        throw FitError(FitFailure::NoDipFound, "no dip found: fewer than 3 samples in window");

    // Baseline: median of the stopband (samples above half the window peak).
    const double peak = *std::max_element(y.begin() + lo, y.begin() + hi);
    std::vector<double> band;
    for (std::size_t i = lo; i < hi; ++i)
        if (y[i] >= 0.5 * peak)
            band.push_back(y[i]);
    const double baseline = median(band);

    // Noise floor from second differences (insensitive to smooth lineshapes).
    std::vector<double> d2;
    for (std::size_t i = lo + 1; i + 1 < hi; ++i)
        d2.push_back(std::abs(y[i + 1] - 2.0 * y[i] + y[i - 1]));
    const double noise = 1.4826 * median(d2) / std::sqrt(6.0);

    std::size_t best = hi;
    for (std::size_t i = std::max(lo, std::size_t{1}); i < hi && i + 1 < x.size(); ++i) {
        const bool local = y[i] <= y[i - 1] && y[i] <= y[i + 1] && (y[i] < y[i - 1] || y[i] < y[i + 1]);
        if (local && (best == hi || y[i] < y[best]))
            best = i;
    }
    if (best == hi || !(y[best] < baseline - 3.0 * noise) || !(baseline - y[best] > 1e-9))
        throw FitError(FitFailure::NoDipFound, "no dip found in window");

    DipGuess g;
    g.lambda0 = x[best];
    g.r0 = y[best];
    g.baseline = baseline;
    g.noise_floor = noise;
    g.window_min = window_min;
    g.window_max = window_max;

    const double half = 0.5 * (baseline + g.r0);
    double left = x[lo];
    for (std::size_t i = best; i > lo; --i)
        if (y[i - 1] >= half) {
            left = crossing(x[i - 1], y[i - 1], x[i], y[i], half);
            break;
        }
    double right = x[hi - 1];
    for (std::size_t i = best; i + 1 < hi; ++i)
        if (y[i + 1] >= half) {
            right = crossing(x[i], y[i], x[i + 1], y[i + 1], half);
            break;
        }
    g.delta_lambda = right - left;
    if (!(g.delta_lambda > 0))
        throw FitError(FitFailure::NoDipFound, "no dip found: unresolved dip width");
    return g;
}

DipGuess find_dip(const Spectrum &spectrum, double window_min, double window_max)
{
    return find_dip(spectrum.wavelengths, spectrum.R, window_min, window_max);
}

double lorentzian_dip(double lambda_nm, double lambda0, double delta_lambda, double r0, double baseline)
{
    const double hw2 = 0.25 * delta_lambda * delta_lambda;
    const double d = lambda_nm - lambda0;
    return baseline - (baseline - r0) * hw2 / (d * d + hw2);
}

namespace
{
// Parameters in scaled coordinates: x = (lambda - c) / s,
// p = (u, w, r0, b) with lambda0 = c + s u, delta_lambda = s w.
struct Scaled
{
    double c;
    double s;
};

struct LmOutcome
{
    Eigen::Vector4d p;
    Eigen::Matrix4d jtj;
    double ssr;
    int iterations;
    bool converged;
};

double model(double x, const Eigen::Vector4d &p)
{
    const double hw2 = 0.25 * p[1] * p[1];
    const double d = x - p[0];
    return p[3] - (p[3] - p[2]) * hw2 / (d * d + hw2);
}

Eigen::Vector4d gradient(double x, const Eigen::Vector4d &p)
{
    const double hw2 = 0.25 * p[1] * p[1];
    const double d = x - p[0];
    const double den = d * d + hw2;
    const double l = hw2 / den; // Lorentzian, peak 1
    const double a = p[3] - p[2];
    Eigen::Vector4d g;
    g[0] = -a * l * 2.0 * d / den;
    g[1] = -a * (0.5 * p[1] * den - hw2 * 0.5 * p[1]) / (den * den);
    g[2] = l;
    g[3] = 1.0 - l;
    return g;
}

LmOutcome levenberg_marquardt(const std::vector<double> &x, const std::vector<double> &y, Eigen::Vector4d p,
                              const FitOptions &options)
{
    auto residuals = [&](const Eigen::Vector4d &q) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - model(x[i], q);
            ssr += r * r;
        }
        return ssr;
    };

    double mu = 1e-3;
    double ssr = residuals(p);
    LmOutcome out{p, Eigen::Matrix4d::Zero(), ssr, 0, false};
    for (int it = 1; it <= options.max_iterations; ++it) {
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const Eigen::Vector4d g = gradient(x[i], p);
            jtj += g * g.transpose();
            jtr += g * (y[i] - model(x[i], p));
        }
        out.jtj = jtj;
        out.iterations = it;

        bool accepted = false;
        Eigen::Vector4d step = Eigen::Vector4d::Zero();
        while (mu < 1e16) {
            Eigen::Matrix4d a = jtj;
            for (int k = 0; k < 4; ++k)
                a(k, k) += mu * std::max(jtj(k, k), 1e-30);
            step = a.ldlt().solve(jtr);
            Eigen::Vector4d trial = p + step;
            if (!(trial[1] > 0))
                trial[1] = 0.5 * p[1];
            step = trial - p;
            const double trial_ssr = residuals(trial);
            if (std::isfinite(trial_ssr) && trial_ssr <= ssr) {
                p = trial;
                ssr = trial_ssr;
                mu = std::max(mu * 0.3, 1e-12);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        out.p = p;
        out.ssr = ssr;
        // No downhill step exists at the numerical minimum; that counts as converged.
        if (!accepted || step.norm() <= options.step_tolerance * (p.norm() + options.step_tolerance) ||
            ssr == 0.0) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

} // namespace

ResonanceFit fit_lorentzian(std::span<const double> wl, std::span<const double> refl, const DipGuess &guess,
                            const FitOptions &options)
{
    check_sizes(wl, refl);
    if (!(guess.delta_lambda > 0) || !(guess.lambda0 > 0))
        throw ConfigError("invalid dip guess");

    double lambda0 = guess.lambda0;
    double dl = guess.delta_lambda;
    Eigen::Vector4d p(0.0, 1.0, guess.r0, guess.baseline);
    LmOutcome lm{};
    Scaled sc{lambda0, dl};
    std::vector<double> x, y;
    double step_near = 0.0;

    // Second pass re-centres the window on the first fit.
    for (int pass = 0; pass < 2; ++pass) {
        double a = lambda0 - options.window_linewidths * dl;
        double b = lambda0 + options.window_linewidths * dl;
        if (guess.window_max > guess.window_min) {
            a = std::max(a, guess.window_min);
            b = std::min(b, guess.window_max);
        }
        x.clear();
        y.clear();
        sc = {lambda0, dl};
        std::vector<double> spacing;
        for (std::size_t i = 0; i < wl.size(); ++i) {
            if (wl[i] < a || wl[i] > b)
                continue;
            x.push_back((wl[i] - sc.c) / sc.s);
            y.push_back(refl[i]);
            if (i + 1 < wl.size() && wl[i + 1] <= b && std::abs(wl[i] - lambda0) <= dl)
                spacing.push_back(wl[i + 1] - wl[i]);
        }
        if (x.size() < 6)
            throw FitError(FitFailure::GridLimited, "fit window holds fewer than 6 samples");
        step_near = spacing.empty() ? (b - a) / static_cast<double>(x.size()) : median(spacing);

        p[0] = (lambda0 - sc.c) / sc.s;
        p[1] = dl / sc.s;
        lm = levenberg_marquardt(x, y, p, options);
        if (!lm.converged)
            throw FitError(FitFailure::NotConverged,
                           "Lorentzian fit did not converge in " + std::to_string(options.max_iterations) +
                               " iterations");
        p = lm.p;
        lambda0 = sc.c + sc.s * p[0];
        dl = sc.s * std::abs(p[1]);
        if (!(dl > 0) || !std::isfinite(lambda0))
            throw FitError(FitFailure::NotConverged, "Lorentzian fit diverged");
        if (lambda0 < wl.front() || lambda0 > wl.back())
            throw FitError(FitFailure::NotConverged, "fitted resonance left the spectrum range");
    }

    if (dl < 2.0 * step_near)
        throw FitError(FitFailure::GridLimited, "fitted linewidth is below two grid steps");

    ResonanceFit f;
    f.lambda0 = lambda0;
    f.delta_lambda = dl;
    f.r0 = p[2];
    f.baseline = p[3];
    if (f.r0 < 0.0) {
        f.r0 = 0.0;
        f.r0_clamped = true;
    }
    f.q = f.lambda0 / f.delta_lambda;
    f.kappa_hz = linewidth_hz(f.lambda0, f.delta_lambda);
    f.points = x.size();
    f.iterations = lm.iterations;
    f.residual_rms = std::sqrt(lm.ssr / static_cast<double>(x.size()));

    const double dof = static_cast<double>(x.size()) - 4.0;
    if (dof > 0) {
        const Eigen::Matrix4d cov = lm.jtj.inverse() * (lm.ssr / dof);
        f.sigma_lambda0 = sc.s * std::sqrt(std::max(cov(0, 0), 0.0));
        f.sigma_delta_lambda = sc.s * std::sqrt(std::max(cov(1, 1), 0.0));
        f.sigma_r0 = std::sqrt(std::max(cov(2, 2), 0.0));
        f.sigma_baseline = std::sqrt(std::max(cov(3, 3), 0.0));
    }
    return f;
}

ResonanceFit fit_lorentzian(const Spectrum &spectrum, const DipGuess &guess, const FitOptions &options)
{
    return fit_lorentzian(spectrum.wavelengths, spectrum.R, guess, options);
}

CouplingRegime classify_regime(double kappa_hz, double kappa_sc_hz, double tolerance)
{
    if (!(kappa_hz > 0) || !(kappa_sc_hz > 0))
        throw ConfigError("coupling rates must be > 0");
    CouplingRegime c;
    c.kappa_hz = kappa_hz;
    c.kappa_sc_hz = kappa_sc_hz;
    c.tolerance = tolerance;
    c.margin_hz = kappa_hz - 2.0 * kappa_sc_hz;
    if (std::abs(c.margin_hz) <= tolerance * kappa_hz)
        c.regime = Regime::Critical;
    else
        c.regime = c.margin_hz > 0 ? Regime::Over : Regime::Under;
    return c;
}

double r0_model(double kappa_hz, double kappa_sc_hz)
{
    const double a = 1.0 - 2.0 * kappa_sc_hz / kappa_hz;
    return a * a;
}

KappaScFit fit_kappa_sc(std::span<const R0Point> points)
{
    if (points.empty())
        throw ConfigError("fit_kappa_sc needs at least one point");
    double kmax = 0.0;
    for (const auto &pt : points) {
        if (!(pt.kappa_hz > 0))
            throw ConfigError("kappa values must be > 0");
        kmax = std::max(kmax, pt.kappa_hz);
    }
    const double upper = 0.5 * kmax;

    auto cost = [&](double s) {
        double acc = 0.0;
        for (const auto &pt : points) {
            const double r = pt.r0 - r0_model(pt.kappa_hz, s);
            acc += r * r;
        }
        return acc;
    };
    auto slope = [&](double s) {
        double acc = 0.0;
        for (const auto &pt : points) {
            const double a = 1.0 - 2.0 * s / pt.kappa_hz;
            acc += 2.0 * (pt.r0 - a * a) * (4.0 * a / pt.kappa_hz);
        }
        return acc;
    };

    // Coarse scan for the global basin, then root of the slope inside it.
    constexpr int kScan = 4000;
    int best = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kScan; ++i) {
        const double s = upper * i / kScan;
        const double c = cost(s);
        if (c < best_cost) {
            best_cost = c;
            best = i;
        }
    }
    const double a = upper * std::max(best - 1, 0) / kScan;
    const double b = upper * std::min(best + 1, kScan) / kScan;
    double s_hat = upper * best / kScan;
    const double fa = a > 0 ? slope(a) : slope(upper * 1e-12);
    const double fb = slope(b);
    if (fa < 0 && fb > 0) {
        boost::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(
            slope, a > 0 ? a : upper * 1e-12, b, fa, fb,
            [](double lo, double hi) { return std::abs(hi - lo) <= 1e-14 * std::abs(hi); }, iters);
        const double root = 0.5 * (r.first + r.second);
        if (cost(root) <= cost(s_hat))
            s_hat = root;
    }

    KappaScFit f;
    f.kappa_sc_hz = s_hat;
    f.points = points.size();
    const double c_hat = cost(s_hat);
    f.residual_rms = std::sqrt(c_hat / static_cast<double>(points.size()));

    const double h = 1e-4 * s_hat;
    const double curvature = (cost(s_hat + h) - 2.0 * c_hat + cost(s_hat - h)) / (h * h);
    const double dof = std::max(1.0, static_cast<double>(points.size()) - 1.0);
    f.sigma_hz = curvature > 0 ? std::sqrt(2.0 * (c_hat / dof) / curvature) : std::numeric_limits<double>::infinity();

    bool below = false;
    bool above = false;
    for (const auto &pt : points) {
        below = below || pt.kappa_hz < 2.0 * s_hat;
        above = above || pt.kappa_hz > 2.0 * s_hat;
    }
    f.poorly_constrained = points.size() < 3 || !(below && above);
    if (f.poorly_constrained && !std::isfinite(f.sigma_hz))
        f.sigma_hz = s_hat;
    return f;
}

} // namespace ncfcav
