#include <doctest.h>

#include <cmath>

#include "ncfcav/calibrate.hpp"
#include "ncfcav/calibration.hpp"
#include "ncfcav/error.hpp"

using namespace ncfcav;
using namespace ncfcav::calibration;

// Regression fixtures: the frozen constants must keep reproducing the
// targets they were calibrated against.

TEST_CASE("frozen constants are in range")
{
    CHECK(kSlatLoss >= 1e-7);
    CHECK(kSlatLoss <= 1e-3);
    CHECK(IndexModel::calibrated().slat_loss == kSlatLoss);
    CHECK(IndexModel::calibrated().index_contrast == kIndexContrast);
    CHECK(EmitterModel::calibrated().guided_fraction == kGuidedFraction);
    CHECK(IndexModel::lossless().slat_loss == 0.0);
}

TEST_CASE("scattering rate of the loss-calibrated family")
{
    const LossCalibrationOptions opts;
    const KappaScFit f = family_kappa_sc(CavityDesign{}, IndexModel::calibrated(), opts);
    CHECK(std::abs(f.kappa_sc_hz - kTargetKappaScHz) <= opts.tolerance * kTargetKappaScHz);
    CHECK_FALSE(f.poorly_constrained);

    SUBCASE("more loss scatters more")
    {
        IndexModel doubled = IndexModel::calibrated();
        doubled.slat_loss *= 2;
        CHECK(family_kappa_sc(CavityDesign{}, doubled, opts).kappa_sc_hz > f.kappa_sc_hz);
    }
}

TEST_CASE("lossless family with a closed output mirror")
{
    // At N_out = 400 the output mirror still leaks a few GHz, which the
    // one-sided model books as scattering; a longer mirror removes it.
    LossCalibrationOptions opts;
    opts.n_out = 800;
    const KappaScFit f = family_kappa_sc(CavityDesign{}, IndexModel::lossless(), opts);
    CHECK(f.kappa_sc_hz < 0.1e9);
}

TEST_CASE("loss bisection")
{
    SUBCASE("hits the target from the frozen bracket")
    {
        LossCalibrationOptions opts;
        opts.im_min = 0.5 * kSlatLoss;
        opts.im_max = 2.0 * kSlatLoss;
        const LossCalibration c = calibrate_slat_loss(CavityDesign{}, kTargetKappaScHz, IndexModel::calibrated(), opts);
        CHECK(std::abs(c.kappa_sc_hz - kTargetKappaScHz) <= opts.tolerance * kTargetKappaScHz);
        CHECK(c.slat_loss > opts.im_min);
        CHECK(c.slat_loss < opts.im_max);
    }
    SUBCASE("unreachable target names the bracket")
    {
        LossCalibrationOptions opts;
        opts.im_min = 1e-8;
        opts.im_max = 1e-6;
        opts.max_iterations = 2;
        try {
            calibrate_slat_loss(CavityDesign{}, kTargetKappaScHz, IndexModel::calibrated(), opts);
            FAIL("expected an unreachable target");
        } catch (const FitError &e) {
            CHECK(e.kind() == FitFailure::Unreachable);
            CHECK(std::string(e.what()).find("unreachable") != std::string::npos);
        }
    }
    SUBCASE("bad arguments")
    {
        CHECK_THROWS_AS(calibrate_slat_loss(CavityDesign{}, 0.0), ConfigError);
        LossCalibrationOptions opts;
        opts.im_min = 1e-3;
        opts.im_max = 1e-4;
        CHECK_THROWS_AS(calibrate_slat_loss(CavityDesign{}, kTargetKappaScHz, IndexModel::calibrated(), opts),
                        ConfigError);
    }
}

TEST_CASE("guided fraction balance")
{
    const GuidedFractionCalibration g = calibrate_guided_fraction(CavityDesign{}, IndexModel::calibrated());
    CHECK(g.guided_fraction == doctest::Approx(kGuidedFraction).epsilon(1e-6));
    CHECK(g.eta_low == doctest::Approx(g.eta_high).epsilon(1e-9));
    CHECK_THROWS_AS(calibrate_guided_fraction(CavityDesign{}, IndexModel::calibrated(), 160, 140), ConfigError);
}
