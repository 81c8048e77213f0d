#include "ncfcav/cqed.hpp"

#include <cmath>

#include "ncfcav/error.hpp"

namespace ncfcav
{
namespace
{
void require_positive(double v, const char *what)
{
    if (!(v > 0))
        throw ConfigError(std::string(what) + " must be > 0");
}

bool close(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

} // namespace

double r0_on_resonance(double kappa_in_hz, double kappa_sc_hz)
{
    if (kappa_in_hz < 0 || kappa_sc_hz < 0)
        throw ConfigError("coupling rates must be >= 0");
    const double total = kappa_in_hz + kappa_sc_hz;
    if (!(total > 0))
        throw ConfigError("kappa_in and kappa_sc cannot both be zero");
    const double a = (kappa_in_hz - kappa_sc_hz) / total;
    return a * a;
}

double q_sc(double lambda0_nm, double kappa_sc_hz)
{
    require_positive(lambda0_nm, "lambda0");
    require_positive(kappa_sc_hz, "kappa_sc");
    return optical_frequency_hz(lambda0_nm) / kappa_sc_hz;
}

double finesse_sc(double l_eff_um, double kappa_sc_hz)
{
    require_positive(l_eff_um, "l_eff");
    require_positive(kappa_sc_hz, "kappa_sc");
    const double fsr = kSpeedOfLight / (2.0 * l_eff_um * kUmToM);
    return fsr / kappa_sc_hz;
}

double one_pass_loss(double finesse)
{
    require_positive(finesse, "finesse");
    return kPi / finesse;
}

double coupling_rate(double purcell, double kappa_hz, double gamma_hz)
{
    if (purcell < 0)
        throw ConfigError("purcell must be >= 0");
    require_positive(kappa_hz, "kappa");
    require_positive(gamma_hz, "gamma");
    return 0.5 * std::sqrt(purcell * kappa_hz * gamma_hz);
}

double cooperativity(double g0_hz, double kappa_hz, double gamma_hz)
{
    require_positive(kappa_hz, "kappa");
    require_positive(gamma_hz, "gamma");
    return 4.0 * g0_hz * g0_hz / (kappa_hz * gamma_hz);
}

CqedReport make_report(const CqedInputs &in)
{
    CqedReport r;
    r.lambda0 = in.lambda0_nm;
    r.kappa_hz = in.kappa_hz;
    r.kappa_sc_hz = in.kappa_sc_hz;
    r.kappa_in_hz = in.kappa_hz - in.kappa_sc_hz;
    r.q_sc = q_sc(in.lambda0_nm, in.kappa_sc_hz);
    r.finesse_sc = finesse_sc(in.l_eff_um, in.kappa_sc_hz);
    r.one_pass_loss = one_pass_loss(r.finesse_sc);
    r.l_eff = in.l_eff_um;
    r.purcell = in.purcell;
    r.gamma_hz = in.gamma_hz;
    r.g0_hz = coupling_rate(in.purcell, in.kappa_hz, in.gamma_hz);
    r.cooperativity = cooperativity(r.g0_hz, in.kappa_hz, in.gamma_hz);
    r.eta = in.eta;

    if (!close(r.kappa_in_hz + r.kappa_sc_hz, r.kappa_hz, 1e-9) ||
        !close(r.q_sc * r.kappa_sc_hz, optical_frequency_hz(r.lambda0), 1e-9) ||
        !close(r.one_pass_loss * r.finesse_sc, kPi, 1e-9))
        throw InvariantError("cavity-QED report identities violated");
    return r;
}

} // namespace ncfcav
