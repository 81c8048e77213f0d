#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ncfcav/design.hpp"
#include "ncfcav/error.hpp"
#include "ncfcav/spectra.hpp"
#include "ncfcav/sweep.hpp"
#include "ncfcav/units.hpp"

using namespace ncfcav;

namespace
{
struct Synthetic
{
    std::vector<double> wl;
    std::vector<double> r;
};

Synthetic synthetic(double l0, double dl, double r0, double b, double step_nm, double half_width_nm,
                    double noise = 0.0, unsigned seed = 0)
{
    Synthetic s;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, noise);
    const int n = static_cast<int>(std::round(2 * half_width_nm / step_nm));
    for (int i = 0; i <= n; ++i) {
        const double l = l0 - half_width_nm + i * step_nm;
        s.wl.push_back(l);
        s.r.push_back(lorentzian_dip(l, l0, dl, r0, b) + (noise > 0 ? g(rng) : 0.0));
    }
    return s;
}

ResonanceFit fit(const Synthetic &s, const FitOptions &o = {})
{
    const DipGuess g = find_dip(s.wl, s.r, s.wl.front(), s.wl.back());
    return fit_lorentzian(s.wl, s.r, g, o);
}

FitFailure failure_of(const Synthetic &s, const FitOptions &o = {})
{
    try {
        fit(s, o);
    } catch (const FitError &e) {
        return e.kind();
    }
    FAIL("fit did not fail");
    return FitFailure::Unreachable;
}

bool rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }
} // namespace

TEST_CASE("dip model")
{
    CHECK(lorentzian_dip(620.0, 620.0, 0.032, 0.05, 0.95) == doctest::Approx(0.05));
    CHECK(lorentzian_dip(620.016, 620.0, 0.032, 0.05, 0.95) == doctest::Approx(0.5));
    CHECK(lorentzian_dip(700.0, 620.0, 0.032, 0.05, 0.95) == doctest::Approx(0.95).epsilon(1e-6));
}

TEST_CASE("dip detection")
{
    const Synthetic s = synthetic(620.0, 0.032, 0.05, 0.95, 0.001, 0.3);
    const DipGuess g = find_dip(s.wl, s.r, s.wl.front(), s.wl.back());
    CHECK(rel(g.lambda0, 620.0, 1e-6));
    CHECK(rel(g.delta_lambda, 0.032, 0.05));
    CHECK(rel(g.r0, 0.05, 0.05));
    CHECK(rel(g.baseline, 0.95, 0.05));

    std::vector<double> wl, mono;
    for (int i = 0; i < 200; ++i) {
        wl.push_back(600.0 + 0.1 * i);
        mono.push_back(0.2 + 0.003 * i);
    }
    try {
        find_dip(wl, mono, 600.0, 619.9);
        FAIL("expected no dip");
    } catch (const FitError &e) {
        CHECK(e.kind() == FitFailure::NoDipFound);
    }
}

TEST_CASE("noiseless round trip")
{
    const Synthetic s = synthetic(620.0, 0.032, 0.05, 0.95, 0.0005, 0.3);
    const ResonanceFit f = fit(s);
    CHECK(rel(f.lambda0, 620.0, 1e-6));
    CHECK(rel(f.delta_lambda, 0.032, 1e-6));
    CHECK(rel(f.r0, 0.05, 1e-6));
    CHECK(rel(f.baseline, 0.95, 1e-6));
    CHECK(f.residual_rms < 1e-9);
    CHECK(rel(f.q, 620.0 / 0.032, 1e-6));
}

TEST_CASE("random noiseless round trips")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> l0(580.0, 660.0), dl(0.01, 0.5), r0(0.0, 0.6), b(0.7, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double pl = l0(rng), pd = dl(rng), pb = b(rng), pr = std::min(r0(rng), 0.8 * pb);
        const Synthetic s = synthetic(pl, pd, pr, pb, pd / 40.0, 6 * pd);
        const ResonanceFit f = fit(s);
        CHECK(rel(f.lambda0, pl, 1e-6));
        CHECK(rel(f.delta_lambda, pd, 1e-6));
        CHECK(std::abs(f.r0 - pr) <= 1e-6 * std::max(pr, 1e-3));
        CHECK(rel(f.baseline, pb, 1e-6));
    }
}

TEST_CASE("noisy fits")
{
    int within = 0;
    for (unsigned seed = 0; seed < 100; ++seed) {
        const Synthetic s = synthetic(620.0, 0.032, 0.05, 0.95, 0.001, 0.3, 0.01, seed);
        const ResonanceFit f = fit(s);
        if (std::abs(f.lambda0 - 620.0) <= 0.1 * 0.032 && rel(f.delta_lambda, 0.032, 0.05))
            ++within;
        CHECK(f.sigma_lambda0 > 0.0);
    }
    CHECK(within == 100);
}

TEST_CASE("linewidth to decay rate")
{
    const Synthetic s = synthetic(620.0, 0.032, 0.05, 0.95, 0.0005, 0.3);
    const ResonanceFit f = fit(s);
    CHECK(f.kappa_hz == doctest::Approx(24.9567e9).epsilon(1e-4));
    CHECK(f.kappa_hz == doctest::Approx(linewidth_hz(620.0, 0.032)).epsilon(1e-6));
}

TEST_CASE("failure kinds are distinct")
{
    // Samples much coarser than the line.
    CHECK(failure_of(synthetic(620.0, 0.032, 0.05, 0.95, 0.03, 1.0)) == FitFailure::GridLimited);
    FitOptions tight;
    tight.max_iterations = 1;
    CHECK(failure_of(synthetic(620.0, 0.032, 0.05, 0.95, 0.001, 0.3, 0.01, 1), tight) ==
          FitFailure::NotConverged);
}

TEST_CASE("regime classification")
{
    CHECK(classify_regime(253e9, 25e9).regime == Regime::Over);
    CHECK(classify_regime(30e9, 25e9).regime == Regime::Under);
    CHECK(classify_regime(50e9, 25e9).regime == Regime::Critical);
    CHECK(classify_regime(50e9 * 1.04, 25e9).regime == Regime::Critical);
    CHECK(classify_regime(50e9 * 1.06, 25e9).regime == Regime::Over);
    CHECK(classify_regime(50e9 * 0.94, 25e9).regime == Regime::Under);
    CHECK(classify_regime(253e9, 25e9).margin_hz == doctest::Approx(203e9));
    for (double k : {20e9, 49e9, 51e9, 253e9})
        for (double scale : {1e-6, 0.3, 7.0, 1e4})
            CHECK(classify_regime(k * scale, 25e9 * scale).regime == classify_regime(k, 25e9).regime);
    CHECK(to_string(Regime::Over) == "over");
    CHECK(to_string(Regime::Critical) == "critical");
    CHECK(to_string(Regime::Under) == "under");
    CHECK_THROWS_AS(classify_regime(0.0, 25e9), ConfigError);
    CHECK_THROWS_AS(classify_regime(30e9, -1.0), ConfigError);
}

TEST_CASE("on-resonance reflectivity model")
{
    const double ksc = 25e9;
    CHECK(r0_model(2 * ksc, ksc) == 0.0);
    double prev = r0_model(1.01 * ksc, ksc);
    for (double k = 1.1 * ksc; k < 2 * ksc; k += 0.1 * ksc) {
        CHECK(r0_model(k, ksc) < prev);
        CHECK(r0_model(k, ksc) >= 0.0);
        prev = r0_model(k, ksc);
    }
    prev = 0.0;
    for (double k = 2.1 * ksc; k < 40 * ksc; k *= 1.3) {
        CHECK(r0_model(k, ksc) > prev);
        prev = r0_model(k, ksc);
    }
}

TEST_CASE("scattering-rate fit")
{
    const double ksc = 25e9;
    std::vector<R0Point> pts;
    for (double k = 50e9; k <= 400e9; k += 50e9)
        pts.push_back({k, r0_model(k, ksc)});

    SUBCASE("noiseless")
    {
        const KappaScFit f = fit_kappa_sc(pts);
        CHECK(rel(f.kappa_sc_hz, ksc, 1e-9));
        CHECK(f.points == pts.size());
        CHECK(f.residual_rms < 1e-9);
    }
    SUBCASE("noiseless, both sides of the minimum")
    {
        std::vector<R0Point> both;
        for (double k : {30e9, 40e9, 50e9, 80e9, 150e9, 300e9})
            both.push_back({k, r0_model(k, ksc)});
        const KappaScFit f = fit_kappa_sc(both);
        CHECK(rel(f.kappa_sc_hz, ksc, 1e-9));
        CHECK_FALSE(f.poorly_constrained);
    }
    SUBCASE("2% relative noise")
    {
        int within = 0;
        for (unsigned seed = 0; seed < 100; ++seed) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> g(0.0, 0.02);
            std::vector<R0Point> noisy = pts;
            for (auto &p : noisy)
                p.r0 *= 1.0 + g(rng);
            if (rel(fit_kappa_sc(noisy).kappa_sc_hz, ksc, 0.05))
                ++within;
        }
        CHECK(within == 100);
    }
    SUBCASE("one regime side or too few points")
    {
        const std::vector<R0Point> two{{300e9, r0_model(300e9, ksc)}, {400e9, r0_model(400e9, ksc)}};
        CHECK(fit_kappa_sc(two).poorly_constrained);
        const std::vector<R0Point> over{{200e9, r0_model(200e9, ksc)},
                                        {300e9, r0_model(300e9, ksc)},
                                        {400e9, r0_model(400e9, ksc)}};
        CHECK(fit_kappa_sc(over).poorly_constrained);
    }
    SUBCASE("empty input")
    {
        CHECK_THROWS(fit_kappa_sc(std::vector<R0Point>{}));
    }
}

TEST_CASE("simulated dips")
{
    const CavityDesign d = CavityDesign{}.with_slats(240, 400);
    const EffectiveIndexProfile p = effective_indices(d, IndexModel::calibrated());
    const LayerStack s = build_stack(d, p);
    const WavelengthWindow w = resonance_window(d, p);

    const Spectrum sp = reflection_spectrum(s, w.lo, w.hi, 4001);
    const DipGuess g = find_dip(sp, w.lo, w.hi);
    const ResonanceFit f = fit_lorentzian(sp, g);
    SUBCASE("guess lands within a linewidth of the resonance")
    {
        CHECK(std::abs(g.lambda0 - f.lambda0) < f.delta_lambda);
        CHECK(std::abs(f.lambda0 - 620.0) < 1.5);
    }
    SUBCASE("linewidth is grid independent")
    {
        const Spectrum fine = reflection_spectrum(s, w.lo, w.hi, 8001);
        const ResonanceFit ff = fit_lorentzian(fine, find_dip(fine, w.lo, w.hi));
        CHECK(std::abs(ff.kappa_hz - f.kappa_hz) < 0.005 * f.kappa_hz);
    }
}
