#pragma once

// Closed-form cavity-QED figures of merit for a one-sided cavity.
//
// Rates are ordinary-frequency linewidths in Hz. The free spectral range
// uses l_eff as an optical length: FSR = c / (2 l_eff).

#include "ncfcav/units.hpp"

namespace ncfcav
{
// NV-centre free decay rate; callers pass gamma explicitly.
inline constexpr double kNvGammaHz = 1.2e9;

// ((kappa_in - kappa_sc) / (kappa_in + kappa_sc))^2. Throws ConfigError if a
// rate is negative or both are zero.
double r0_on_resonance(double kappa_in_hz, double kappa_sc_hz);

// (c / lambda0) / kappa_sc
double q_sc(double lambda0_nm, double kappa_sc_hz);

// (c / (2 l_eff)) / kappa_sc
double finesse_sc(double l_eff_um, double kappa_sc_hz);

// pi / F, as a fraction.
double one_pass_loss(double finesse);

// g0 from C ~= F_P and C = 4 g0^2 / (kappa gamma): 2 g0 = sqrt(F_P kappa gamma).
double coupling_rate(double purcell, double kappa_hz, double gamma_hz);

// 4 g0^2 / (kappa gamma)
double cooperativity(double g0_hz, double kappa_hz, double gamma_hz);

struct CqedReport
{
    double lambda0 = 0.0; // nm
    double kappa_hz = 0.0;
    double kappa_in_hz = 0.0;
    double kappa_sc_hz = 0.0;
    double q_sc = 0.0;
    double finesse_sc = 0.0;
    double one_pass_loss = 0.0; // fraction
    double l_eff = 0.0;         // um
    double purcell = 0.0;
    double cooperativity = 0.0;
    double g0_hz = 0.0;
    double gamma_hz = kNvGammaHz;
    double eta = 0.0;
};

struct CqedInputs
{
    double lambda0_nm = 0.0;
    double kappa_hz = 0.0;
    double kappa_sc_hz = 0.0;
    double l_eff_um = 0.0;
    double purcell = 0.0;
    double eta = 0.0;
    double gamma_hz = kNvGammaHz;
};

// kappa_in = kappa - kappa_sc. Throws InvariantError if any identity of the
// report fails to hold.
CqedReport make_report(const CqedInputs &in);

} // namespace ncfcav
