#include <doctest.h>

#include "ncfcav/design.hpp"
#include "ncfcav/error.hpp"

using namespace ncfcav;

TEST_CASE("default design geometry")
{
    const CavityDesign d;
    CHECK_NOTHROW(d.validate());
    CHECK(d.slat_thickness == doctest::Approx(36.6).epsilon(1e-12));
    CHECK(d.defect_width == doctest::Approx(366.0).epsilon(1e-12));
    CHECK(make_design(244.0, 0.15, 150, 400) == d);
}

TEST_CASE("design validation")
{
    CavityDesign d;
    d.slat_thickness = 40.0;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = CavityDesign{};
    d.defect_width = 300.0;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = CavityDesign{};
    d.n_slats_input = -1;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = CavityDesign{};
    d.n_water = 0.9;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    CHECK_THROWS_AS(make_design(244.0, 1.0, 1, 1).validate(), ConfigError);
}

TEST_CASE("polarization names")
{
    CHECK(parse_polarization("ypol") == Polarization::YPol);
    CHECK(parse_polarization("xpol") == Polarization::XPol);
    CHECK(to_string(Polarization::XPol) == "xpol");
    CHECK_THROWS_AS(parse_polarization("zpol"), ConfigError);
}

TEST_CASE("effective indices satisfy the Bragg condition")
{
    for (auto p : {Polarization::YPol, Polarization::XPol}) {
        for (const IndexModel &m : {IndexModel::lossless(), IndexModel::calibrated()}) {
            const CavityDesign d = CavityDesign{}.with_profile(p);
            const EffectiveIndexProfile e = effective_indices(d, m);
            const double lhs = 2.0 * e.mean_index(d.duty_cycle) * kReferencePeriodNm;
            CHECK(std::abs(lhs - target_resonance_nm(p)) <= 1e-12 * target_resonance_nm(p));
            CHECK(e.n_slat.real() > e.n_base.real());
            CHECK(e.n_base.imag() >= 0.0);
            CHECK(e.n_slat.imag() >= 0.0);
        }
    }
    const auto y = effective_indices(CavityDesign{}, IndexModel::calibrated());
    const auto x = effective_indices(CavityDesign{}.with_profile(Polarization::XPol), IndexModel::calibrated());
    CHECK(y.mean_index(0.15) == doctest::Approx(1.27049180327869).epsilon(1e-13));
    CHECK(x.mean_index(0.15) == doctest::Approx(1.26844262295082).epsilon(1e-13));
    CHECK(y.modulation() > x.modulation());
    CHECK(y.n_slat.imag() > x.n_slat.imag());
}

TEST_CASE("small duty cycle: mean index tends to the base index")
{
    const CavityDesign d = make_design(244.0, 1e-9, 10, 10);
    const auto e = effective_indices(d, IndexModel::lossless());
    CHECK(e.mean_index(d.duty_cycle) == doctest::Approx(e.n_base.real()).epsilon(1e-9));
}

TEST_CASE("effective indices reject unphysical models")
{
    IndexModel m = IndexModel::lossless();
    m.index_contrast = 2.0;
    CHECK_THROWS_AS(effective_indices(CavityDesign{}, m), ConfigError);
    m = IndexModel::lossless();
    m.slat_loss = -1e-4;
    CHECK_THROWS_AS(effective_indices(CavityDesign{}, m), ConfigError);
}

TEST_CASE("build_stack layout")
{
    const auto profile = effective_indices(CavityDesign{}, IndexModel::lossless());

    SUBCASE("bare defect")
    {
        const LayerStack s = build_stack(CavityDesign{}.with_slats(0, 0), profile);
        REQUIRE(s.layers.size() == 1);
        CHECK(s.layers[0].thickness == 366.0);
        CHECK(s.layers[0].index == profile.n_base);
        CHECK(s.source_plane == 183.0);
    }
    SUBCASE("default counts")
    {
        const LayerStack s = build_stack(CavityDesign{}, profile);
        CHECK(s.layers.size() == 1101);
        CHECK(s.total_length() == doctest::Approx(134566.0).epsilon(1e-12));
        CHECK(s.layers[0].thickness == doctest::Approx(207.4).epsilon(1e-12));
        CHECK(s.layers[1].thickness == doctest::Approx(36.6).epsilon(1e-12));
        CHECK(s.layers[1].index == profile.n_slat);
        // Slats sit next to the defect on both sides.
        CHECK(s.layers[299].index == profile.n_slat);
        CHECK(s.layers[300].thickness == 366.0);
        CHECK(s.layers[301].index == profile.n_slat);
        CHECK(s.layer_at(s.source_plane) == 300);
        CHECK(s.source_plane == doctest::Approx(150 * 244.0 + 183.0).epsilon(1e-12));
    }
    SUBCASE("count and length arithmetic")
    {
        for (int n_in : {0, 1, 7, 60})
            for (int n_out : {0, 3, 40}) {
                const LayerStack s = build_stack(CavityDesign{}.with_slats(n_in, n_out), profile);
                CHECK(s.layers.size() == static_cast<std::size_t>(2 * (n_in + n_out) + 1));
                CHECK(s.total_length() == doctest::Approx((n_in + n_out) * 244.0 + 366.0).epsilon(1e-12));
                CHECK(s.source_plane >= 0.0);
                CHECK(s.source_plane <= s.total_length());
            }
    }
    SUBCASE("symmetric counts give a mirror-symmetric stack")
    {
        const LayerStack s = build_stack(CavityDesign{}.with_slats(25, 25), profile);
        const LayerStack r = s.reversed();
        CHECK(r.layers == s.layers);
        CHECK(r.source_plane == doctest::Approx(s.source_plane).epsilon(1e-14));
    }
    SUBCASE("deterministic")
    {
        CHECK(build_stack(CavityDesign{}, profile) == build_stack(CavityDesign{}, profile));
    }
}

TEST_CASE("detune_design")
{
    const CavityDesign d;
    CHECK(detune_design(d, 0.0) == d);
    const CavityDesign up = detune_design(d, 10.0);
    CHECK(up.grating_period == doctest::Approx(247.935483870968).epsilon(1e-12));
    CHECK_NOTHROW(up.validate());
    CHECK(detune_design(d, -10.0).grating_period == doctest::Approx(240.064516129032).epsilon(1e-12));
    CHECK_THROWS_AS(detune_design(d, 10.5), ConfigError);
    CHECK_THROWS_AS(detune_design(d, -11.0), ConfigError);
}
