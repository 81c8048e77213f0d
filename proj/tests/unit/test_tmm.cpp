#include <doctest.h>

#include <cmath>
#include <random>

#include "ncfcav/emitter.hpp"
#include "ncfcav/error.hpp"
#include "ncfcav/spectra.hpp"
#include "ncfcav/sweep.hpp"
#include "ncfcav/tmm.hpp"

using namespace ncfcav;

namespace
{
LayerStack random_stack(std::mt19937_64 &rng, bool lossy)
{
    std::uniform_int_distribution<int> count(0, 50);
    std::uniform_real_distribution<double> index(1.0, 3.0);
    std::uniform_real_distribution<double> thick(10.0, 500.0);
    std::uniform_real_distribution<double> loss(0.0, 0.05);
    LayerStack s;
    s.n_left = index(rng);
    s.n_right = index(rng);
    const int n = count(rng);
    for (int i = 0; i < n; ++i)
        s.layers.push_back({thick(rng), Complex(index(rng), lossy ? loss(rng) : 0.0)});
    return s;
}

double rel(Complex a, Complex b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

LayerStack default_stack(int n_in, int n_out, const IndexModel &m = IndexModel::calibrated())
{
    const CavityDesign d = CavityDesign{}.with_slats(n_in, n_out);
    return build_stack(d, effective_indices(d, m));
}
} // namespace

TEST_CASE("empty stack is the identity")
{
    LayerStack s;
    const TransferMatrix m = stack_matrix(s, 633.0);
    CHECK(std::abs(m.m11 - 1.0) < 1e-15);
    CHECK(std::abs(m.m12) < 1e-15);
    CHECK(std::abs(m.m21) < 1e-15);
    CHECK(std::abs(m.m22 - 1.0) < 1e-15);
}

TEST_CASE("single interface Fresnel reflection")
{
    LayerStack s;
    s.n_left = 1.0;
    s.n_right = 1.5;
    for (double l : {400.0, 633.0, 1550.0}) {
        const Amplitudes a = rt_left_incidence(s, l);
        CHECK(std::abs(a.r - Complex(-0.2, 0.0)) < 1e-14);
        CHECK(std::norm(a.r) == doctest::Approx(0.04).epsilon(1e-12));
        CHECK(sample_spectrum(s, l).T == doctest::Approx(0.96).epsilon(1e-12));
    }
}

TEST_CASE("half-wave layer is invisible")
{
    LayerStack s;
    s.n_left = s.n_right = 1.0;
    s.layers.push_back({600.0 / (2.0 * 2.3), Complex(2.3, 0.0)});
    CHECK(std::abs(rt_left_incidence(s, 600.0).r) < 1e-14);
}

TEST_CASE("quarter-wave mirror matches the closed form")
{
    const double lambda = 800.0;
    const double n_hi = 2.3, n_lo = 1.45, n0 = 1.0, ns = 1.52;
    for (int periods : {1, 3, 8, 15}) {
        LayerStack s;
        s.n_left = n0;
        s.n_right = ns;
        for (int i = 0; i < periods; ++i) {
            s.layers.push_back({lambda / (4 * n_hi), Complex(n_hi, 0)});
            s.layers.push_back({lambda / (4 * n_lo), Complex(n_lo, 0)});
        }
        const double y = std::pow(n_hi / n_lo, 2 * periods) * ns;
        const double expected = std::pow((n0 - y) / (n0 + y), 2);
        CHECK(sample_spectrum(s, lambda).R == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("conservation, passivity, reciprocity and composition on random stacks")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> wl(300.0, 1600.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const bool lossy = trial % 2 == 1;
        const LayerStack s = random_stack(rng, lossy);
        const double l = wl(rng);
        const SpectrumSample x = sample_spectrum(s, l);
        if (!lossy)
            CHECK(std::abs(x.R + x.T - 1.0) < 1e-9);
        else
            CHECK(x.R + x.T <= 1.0 + 1e-9);

        const TransferMatrix m = stack_matrix(s, l);
        if (!lossy)
            CHECK(std::abs(m.det() - s.n_right / s.n_left) <= 1e-10 * s.n_right / s.n_left);

        // Transmissivity is the same from both sides, lossy or not.
        const SpectrumSample back = sample_spectrum(s.reversed(), l);
        CHECK(std::abs(back.T - x.T) <= 1e-10 * std::max(x.T, 1e-300) + 1e-15);
        if (!lossy)
            CHECK(std::abs(back.R - x.R) < 1e-9);

        if (s.layers.size() >= 2) {
            const std::size_t cut = s.layers.size() / 2;
            const std::span<const Layer> all(s.layers);
            const Complex mid = s.layers[cut].index;
            const TransferMatrix a = layers_matrix(all.first(cut), s.n_left, mid, l);
            const TransferMatrix b = layers_matrix(all.subspan(cut), mid, s.n_right, l);
            const TransferMatrix ab = a * b;
            const double scale = std::abs(m.m11) + std::abs(m.m12) + std::abs(m.m21) + std::abs(m.m22);
            CHECK(std::abs(ab.m11 - m.m11) + std::abs(ab.m12 - m.m12) + std::abs(ab.m21 - m.m21) +
                      std::abs(ab.m22 - m.m22) <=
                  1e-10 * scale);
        }
    }
}

TEST_CASE("transfer-matrix reflectance agrees with the finite-difference solve")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> count(1, 12);
    std::uniform_real_distribution<double> index(1.0, 3.0);
    std::uniform_real_distribution<double> thick(10.0, 500.0);
    std::uniform_real_distribution<double> wl(400.0, 1000.0);
    for (int trial = 0; trial < 20; ++trial) {
        LayerStack s;
        s.n_left = index(rng);
        s.n_right = index(rng);
        const int n = count(rng);
        for (int i = 0; i < n; ++i)
            s.layers.push_back({thick(rng), Complex(index(rng), trial % 3 == 0 ? 0.01 : 0.0)});
        const double l = wl(rng);
        CHECK(std::abs(sample_spectrum(s, l).R - helmholtz_reflectance(s, l)) < 1e-3);
    }
}

TEST_CASE("rt amplitudes")
{
    LayerStack s;
    s.n_left = 1.0;
    s.n_right = 2.0;
    s.layers.push_back({100.0, Complex(1.7, 0.0)});
    const Amplitudes l = rt_left_incidence(s, 500.0);
    const Amplitudes r = rt_right_incidence(s, 500.0);
    // Stokes relations for a lossless stack.
    CHECK(std::abs(std::norm(l.r) - std::norm(r.r)) < 1e-12);
    CHECK(std::abs(2.0 * std::norm(l.t) - 0.5 * std::norm(r.t)) < 1e-12);
    CHECK_THROWS_AS(rt_left_incidence(s, -1.0), ConfigError);
}

TEST_CASE("mirror coefficients")
{
    SUBCASE("no left mirror: Fresnel reflection at the defect edge")
    {
        LayerStack s;
        s.n_left = s.n_right = 1.0;
        s.layers.push_back({300.0, Complex(1.5, 0.0)});
        s.source_plane = 100.0;
        const MirrorCoefficients mc = mirror_coefficients(s, s.source_plane, 620.0);
        CHECK(rel(mc.r_left, Complex(0.2, 0.0)) < 1e-12);
        CHECK(rel(mc.r_right, Complex(0.2, 0.0)) < 1e-12);
        CHECK(std::abs(mc.phase_left - Complex(2 * kPi / 620.0 * 1.5 * 100.0, 0)) < 1e-12);
    }
    SUBCASE("symmetric stack")
    {
        const LayerStack s = default_stack(30, 30);
        const MirrorCoefficients mc = mirror_coefficients(s, s.source_plane, 621.0);
        CHECK(rel(mc.r_left, mc.r_right) < 1e-9);
        CHECK(rel(mc.t_left, mc.t_right) < 1e-9);
        CHECK(std::abs(mc.phase_left - mc.phase_right) < 1e-12);
    }
    SUBCASE("default design: output mirror is the stronger one")
    {
        const LayerStack s = default_stack(150, 400);
        const MirrorCoefficients mc = mirror_coefficients(s, s.source_plane, 620.98);
        CHECK(std::abs(mc.r_right) > std::abs(mc.r_left));
    }
    SUBCASE("source outside the stack")
    {
        const LayerStack s = default_stack(2, 2);
        CHECK_THROWS_AS(mirror_coefficients(s, s.total_length() + 1.0, 620.0), ConfigError);
    }
}

TEST_CASE("intensity profiles")
{
    SUBCASE("uniform medium is flat")
    {
        LayerStack s;
        s.n_left = s.n_right = 1.4;
        s.layers.push_back({500.0, Complex(1.4, 0.0)});
        s.layers.push_back({300.0, Complex(1.4, 0.0)});
        const auto p = intensity_profile(s, 600.0, Side::Left);
        CHECK(p.size() >= 16);
        for (const auto &x : p)
            CHECK(x.intensity == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("needs 8 points per layer")
    {
        CHECK_THROWS_AS(intensity_profile(default_stack(2, 2), 600.0, Side::Left, 4), ConfigError);
    }
    const CavityDesign d = CavityDesign{}.with_slats(150, 400);
    const EffectiveIndexProfile profile = effective_indices(d, IndexModel::calibrated());
    const LayerStack s = build_stack(d, profile);
    const Resonance res = locate_resonance(s, resonance_window(d, profile), EmitterModel::bare(), 2001);
    SUBCASE("on resonance the maximum sits in the defect")
    {
        const auto p = intensity_profile(s, res.lambda_nm, Side::Left);
        auto peak = std::max_element(p.begin(), p.end(),
                                     [](const auto &a, const auto &b) { return a.intensity < b.intensity; });
        const double defect_lo = 150 * 244.0;
        CHECK(peak->z >= defect_lo);
        CHECK(peak->z <= defect_lo + 366.0);
    }
    SUBCASE("off resonance there is no strong build-up")
    {
        const auto on = intensity_profile(s, res.lambda_nm, Side::Left);
        const auto off = intensity_profile(s, res.lambda_nm + 20.0, Side::Left);
        CHECK(1.0 / off.front().intensity <= 10.0);
        CHECK(1.0 / on.front().intensity > 10.0);
    }
}

TEST_CASE("reflection spectrum of the default family")
{
    const CavityDesign crit = CavityDesign{}.with_slats(240, 400);
    const EffectiveIndexProfile profile = effective_indices(crit, IndexModel::calibrated());
    const WavelengthWindow w = resonance_window(crit, profile);
    const LayerStack s = build_stack(crit, profile);
    const Spectrum sp = reflection_spectrum(s, w.lo, w.hi, 2001);
    const ResonanceFit fit = fit_lorentzian(sp, find_dip(sp, w.lo, w.hi));

    SUBCASE("dip near the design wavelength and inside the stopband")
    {
        const WavelengthWindow band = bragg_stopband(crit, profile);
        CHECK(fit.lambda0 > band.lo);
        CHECK(fit.lambda0 < band.hi);
        CHECK(std::abs(fit.lambda0 - 620.0) < 1.5);
    }
    SUBCASE("adaptive refinement resolves the dip")
    {
        std::size_t inside = 0;
        for (double l : sp.wavelengths)
            inside += std::abs(l - fit.lambda0) <= fit.delta_lambda;
        CHECK(inside >= 50);
    }
    SUBCASE("critical member has a vanishing on-resonance reflectance")
    {
        CHECK(sample_spectrum(s, fit.lambda0).R < 0.01);
    }
    SUBCASE("under-coupled dip is shallower than a less under-coupled one")
    {
        auto r0_at = [&](int n_in) {
            const CavityDesign d = CavityDesign{}.with_slats(n_in, 400);
            const LayerStack st = build_stack(d, profile);
            const Spectrum x = reflection_spectrum(st, w.lo, w.hi, 2001);
            return fit_lorentzian(x, find_dip(x, w.lo, w.hi)).r0;
        };
        CHECK(r0_at(340) > r0_at(290));
    }
    SUBCASE("lossless spectra conserve energy")
    {
        const LayerStack ls = build_stack(crit, effective_indices(crit, IndexModel::lossless()));
        const Spectrum x = reflection_spectrum(ls, w.lo, w.hi, 501);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(std::abs(x.R[i] + x.T[i] - 1.0) < 1e-9);
    }
}

TEST_CASE("adaptive grid arguments")
{
    CHECK_THROWS_AS(adaptive_grid([](double) { return 0.0; }, 2.0, 1.0, 10, Extremum::Minimum), ConfigError);
    CHECK_THROWS_AS(adaptive_grid([](double) { return 0.0; }, 1.0, 2.0, 1, Extremum::Minimum), ConfigError);
    const auto g = adaptive_grid([](double x) { return (x - 1.5) * (x - 1.5); }, 1.0, 2.0, 11, Extremum::Minimum);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 2.0);
}
