#include "ncfcav/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ncfcav/error.hpp"

namespace ncfcav::io
{
std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

Json number(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    return std::strtod(format_double(v).c_str(), nullptr);
}

namespace
{
template <typename T>
T get_as(const Json &doc, const char *key)
{
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ConfigError(std::string("design key '") + key + "' has the wrong type");
    }
}

int get_count(const Json &doc, const char *key)
{
    const Json &v = doc.at(key);
    if (!v.is_number_integer())
        throw ConfigError(std::string("design key '") + key + "' must be an integer");
    return v.get<int>();
}

std::string csv_field(double v)
{
    return std::isfinite(v) ? format_double(v) : "";
}

} // namespace

CavityDesign parse_design(const Json &doc)
{
    static const std::set<std::string> known{
        "grating_period", "duty_cycle",          "slat_thickness",     "slat_height",
        "defect_width",   "n_slats_input",       "n_slats_output",     "ncf_inner_diameter",
        "ncf_outer_diameter", "n_silica",        "n_water",            "polarization_profile"};
    if (!doc.is_object())
        throw ConfigError("design file must hold a JSON object");
    for (const auto &[key, value] : doc.items())
        if (!known.contains(key))
            throw ConfigError("unknown design key '" + key + "'");

    CavityDesign d;
    auto real = [&](const char *key, double &field) {
        if (doc.contains(key))
            field = get_as<double>(doc, key);
    };
    real("grating_period", d.grating_period);
    real("duty_cycle", d.duty_cycle);
    d.slat_thickness = d.duty_cycle * d.grating_period;
    d.defect_width = kDefectToPeriodRatio * d.grating_period;
    real("slat_thickness", d.slat_thickness);
    real("slat_height", d.slat_height);
    real("defect_width", d.defect_width);
    real("ncf_inner_diameter", d.ncf_inner_diameter);
    real("ncf_outer_diameter", d.ncf_outer_diameter);
    real("n_silica", d.n_silica);
    real("n_water", d.n_water);
    if (doc.contains("n_slats_input"))
        d.n_slats_input = get_count(doc, "n_slats_input");
    if (doc.contains("n_slats_output"))
        d.n_slats_output = get_count(doc, "n_slats_output");
    if (doc.contains("polarization_profile"))
        d.polarization_profile = parse_polarization(get_as<std::string>(doc, "polarization_profile"));
    d.validate();
    return d;
}

CavityDesign load_design(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open design file '" + path.string() + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("design file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_design(doc);
}

Json design_to_json(const CavityDesign &d)
{
    Json j;
    j["grating_period"] = number(d.grating_period);
    j["duty_cycle"] = number(d.duty_cycle);
    j["slat_thickness"] = number(d.slat_thickness);
    j["slat_height"] = number(d.slat_height);
    j["defect_width"] = number(d.defect_width);
    j["n_slats_input"] = d.n_slats_input;
    j["n_slats_output"] = d.n_slats_output;
    j["ncf_inner_diameter"] = number(d.ncf_inner_diameter);
    j["ncf_outer_diameter"] = number(d.ncf_outer_diameter);
    j["n_silica"] = number(d.n_silica);
    j["n_water"] = number(d.n_water);
    j["polarization_profile"] = std::string(to_string(d.polarization_profile));
    return j;
}

std::string design_hash(const CavityDesign &d)
{
    // Exact (hex-float) field values, so designs differing below 12 digits differ.
    char buf[512];
    std::snprintf(buf, sizeof buf, "%a|%a|%a|%a|%a|%d|%d|%a|%a|%a|%a|%s", d.grating_period, d.duty_cycle,
                  d.slat_thickness, d.slat_height, d.defect_width, d.n_slats_input, d.n_slats_output,
                  d.ncf_inner_diameter, d.ncf_outer_diameter, d.n_silica, d.n_water,
                  std::string(to_string(d.polarization_profile)).c_str());
    std::uint64_t h = 14695981039346656037ull;
    for (const char *c = buf; *c; ++c) {
        h ^= static_cast<unsigned char>(*c);
        h *= 1099511628211ull;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

Json index_model_to_json(const IndexModel &m)
{
    Json j;
    j["index_contrast"] = number(m.index_contrast);
    j["xpol_contrast_ratio"] = number(m.xpol_contrast_ratio);
    j["slat_loss"] = number(m.slat_loss);
    return j;
}

Json sweep_settings_to_json(const SweepSettings &s)
{
    Json j;
    j["index_model"] = index_model_to_json(s.index);
    j["guided_fraction"] = number(s.emitter.guided_fraction);
    j["spectrum_samples"] = s.spectrum_samples;
    j["peak_samples"] = s.peak_samples;
    return j;
}

Json calibration_to_json(const CalibrationFile &c, const LossCalibration &loss,
                         const GuidedFractionCalibration &guided)
{
    Json j;
    j["index_model"] = index_model_to_json(c.index);
    j["guided_fraction"] = number(c.emitter.guided_fraction);
    Json l;
    l["target_kappa_sc_ghz"] = number(loss.target_hz / kGHz);
    l["achieved_kappa_sc_ghz"] = number(loss.kappa_sc_hz / kGHz);
    l["iterations"] = loss.iterations;
    j["slat_loss_fit"] = l;
    Json g;
    g["n_low"] = guided.n_low;
    g["n_high"] = guided.n_high;
    g["eta_low"] = number(guided.eta_low);
    g["eta_high"] = number(guided.eta_high);
    j["guided_fraction_fit"] = g;
    return j;
}

CalibrationFile load_calibration(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open calibration file '" + path.string() + "'");
    try {
        const Json doc = Json::parse(in);
        CalibrationFile c;
        const Json &m = doc.at("index_model");
        c.index.index_contrast = m.at("index_contrast").get<double>();
        c.index.xpol_contrast_ratio = m.at("xpol_contrast_ratio").get<double>();
        c.index.slat_loss = m.at("slat_loss").get<double>();
        c.emitter.guided_fraction = doc.at("guided_fraction").get<double>();
        return c;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("calibration file '" + path.string() + "' is malformed: " + e.what());
    }
}

std::string spectrum_csv(const Spectrum &s)
{
    std::string out = "wavelength_nm,R,T,re_r,im_r,re_t,im_t\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += format_double(s.wavelengths[i]) + ',' + format_double(s.R[i]) + ',' + format_double(s.T[i]) + ',' +
               format_double(s.r[i].real()) + ',' + format_double(s.r[i].imag()) + ',' +
               format_double(s.t[i].real()) + ',' + format_double(s.t[i].imag()) + '\n';
    }
    return out;
}

std::string emission_csv(std::span<const EmissionSample> samples)
{
    std::string out = "wavelength_nm,purcell,eta_left,eta_right,eta_loss\n";
    for (const auto &s : samples)
        out += format_double(s.wavelength) + ',' + format_double(s.result.purcell) + ',' +
               format_double(s.result.eta_left) + ',' + format_double(s.result.eta_right) + ',' +
               format_double(s.result.eta_loss) + '\n';
    return out;
}

std::string sweep_csv(const SweepTable &t)
{
    const bool fitted = t.kind == SweepKind::Reflection;
    std::string out = "n_in,n_out,lambda0_nm,kappa_ghz,r0,eta,purcell,regime,status\n";
    for (const auto &row : t.rows) {
        const bool ok = row.status == RowStatus::Ok;
        out += std::to_string(row.n_in) + ',' + std::to_string(row.n_out) + ',';
        out += (ok ? csv_field(row.lambda0_nm) : "") + ',';
        out += (ok && fitted ? csv_field(row.kappa_ghz) : "") + ',';
        out += (ok && fitted ? csv_field(row.r0) : "") + ',';
        out += (ok ? csv_field(row.eta) : "") + ',';
        out += (ok ? csv_field(row.purcell) : "") + ',';
        out += (row.regime ? std::string(to_string(*row.regime)) : "") + ',';
        out += std::string(to_string(row.status)) + '\n';
    }
    return out;
}

Json kappa_sc_report(const KappaScFit &fit)
{
    Json j;
    j["kappa_sc_ghz"] = number(fit.kappa_sc_hz / kGHz);
    j["sigma_ghz"] = number(fit.sigma_hz / kGHz);
    j["residual_rms"] = number(fit.residual_rms);
    j["points"] = fit.points;
    j["poorly_constrained"] = fit.poorly_constrained;
    return j;
}

Json sweep_sidecar(const SweepTable &t)
{
    Json j;
    j["kind"] = std::string(to_string(t.kind));
    j["fixed_count"] = t.fixed_count;
    j["swept"] = t.kind == SweepKind::NOut ? "n_slats_output" : "n_slats_input";
    j["design"] = design_to_json(t.design);
    j["design_hash"] = design_hash(t.design);
    j["profile"] = std::string(to_string(t.design.polarization_profile));
    j["settings"] = sweep_settings_to_json(t.settings);
    j["rows"] = t.rows.size();
    if (t.kappa_sc)
        j["kappa_sc_fit"] = kappa_sc_report(*t.kappa_sc);
    j["warnings"] = t.warnings;
    Json failures = Json::array();
    for (const auto &row : t.rows)
        if (row.status != RowStatus::Ok)
            failures.push_back(Json{{"n_in", row.n_in}, {"n_out", row.n_out}, {"message", row.message}});
    j["failures"] = failures;
    return j;
}

Json fit_report(const ResonanceFit &fit, const std::optional<CouplingRegime> &regime)
{
    Json j;
    j["lambda0_nm"] = number(fit.lambda0);
    j["delta_lambda_nm"] = number(fit.delta_lambda);
    j["r0"] = number(fit.r0);
    j["baseline"] = number(fit.baseline);
    j["q"] = number(fit.q);
    j["kappa_ghz"] = number(fit.kappa_hz / kGHz);
    j["residual_rms"] = number(fit.residual_rms);
    j["regime"] = regime ? Json(std::string(to_string(regime->regime))) : Json(nullptr);
    if (regime)
        j["kappa_sc_ghz"] = number(regime->kappa_sc_hz / kGHz);
    Json u;
    u["lambda0_nm"] = number(fit.sigma_lambda0);
    u["delta_lambda_nm"] = number(fit.sigma_delta_lambda);
    u["r0"] = number(fit.sigma_r0);
    u["baseline"] = number(fit.sigma_baseline);
    j["uncertainty"] = u;
    j["points"] = fit.points;
    j["iterations"] = fit.iterations;
    j["r0_clamped"] = fit.r0_clamped;
    return j;
}

Json cqed_report(const CqedReport &r)
{
    Json j;
    j["lambda0_nm"] = number(r.lambda0);
    j["kappa_ghz"] = number(r.kappa_hz / kGHz);
    j["kappa_in_ghz"] = number(r.kappa_in_hz / kGHz);
    j["kappa_sc_ghz"] = number(r.kappa_sc_hz / kGHz);
    j["q_sc"] = number(r.q_sc);
    j["finesse_sc"] = number(r.finesse_sc);
    j["one_pass_loss_pct"] = number(100.0 * r.one_pass_loss);
    j["l_eff_um"] = number(r.l_eff);
    j["purcell"] = number(r.purcell);
    j["cooperativity"] = number(r.cooperativity);
    j["g0_ghz"] = number(r.g0_hz / kGHz);
    j["two_g0_ghz"] = number(2.0 * r.g0_hz / kGHz);
    j["gamma_ghz"] = number(r.gamma_hz / kGHz);
    j["eta"] = number(r.eta);
    return j;
}

Json emission_report(const EmissionResult &e)
{
    Json j;
    j["purcell"] = number(e.purcell);
    j["eta_left"] = number(e.eta_left);
    j["eta_right"] = number(e.eta_right);
    j["eta_loss"] = number(e.eta_loss);
    return j;
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open sweep table '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    if (line != "n_in,n_out,lambda0_nm,kappa_ghz,r0,eta,purcell,regime,status")
        throw ConfigError("'" + path.string() + "' is not a sweep table");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (line.back() == ',')
            f.emplace_back();
        if (f.size() != 9)
            throw ConfigError("malformed sweep row: " + line);
        auto num = [](const std::string &s) { return s.empty() ? 0.0 : std::stod(s); };
        SweepRow r;
        r.n_in = std::stoi(f[0]);
        r.n_out = std::stoi(f[1]);
        r.lambda0_nm = num(f[2]);
        r.kappa_ghz = num(f[3]);
        r.r0 = num(f[4]);
        r.eta = num(f[5]);
        r.purcell = num(f[6]);
        if (f[7] == "over")
            r.regime = Regime::Over;
        else if (f[7] == "critical")
            r.regime = Regime::Critical;
        else if (f[7] == "under")
            r.regime = Regime::Under;
        r.status = RowStatus::NumericalFailure;
        for (RowStatus st : {RowStatus::Ok, RowStatus::NoDipFound, RowStatus::NotConverged, RowStatus::GridLimited})
            if (f[8] == to_string(st))
                r.status = st;
        rows.push_back(r);
    }
    return rows;
}

std::string dump(const Json &j)
{
    return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path &path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw ConfigError("write to '" + path.string() + "' failed");
}

} // namespace ncfcav::io
