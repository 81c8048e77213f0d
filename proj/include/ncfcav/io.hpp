#pragma once

// File formats: design JSON, spectrum/emission/sweep CSV, fit and metrics
// reports, provenance. Every float is written with 12 significant digits so
// identical inputs give byte-identical files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ncfcav/calibrate.hpp"
#include "ncfcav/cqed.hpp"
#include "ncfcav/design.hpp"
#include "ncfcav/emitter.hpp"
#include "ncfcav/spectra.hpp"
#include "ncfcav/sweep.hpp"
#include "ncfcav/tmm.hpp"

namespace ncfcav::io
{
using Json = nlohmann::ordered_json;

// "%.12g"
std::string format_double(double v);
// v rounded to 12 significant digits (non-finite values become null).
Json number(double v);

// Keys are the CavityDesign field names; unknown keys are rejected. Missing
// keys keep their defaults, except that slat_thickness and defect_width are
// derived from grating_period and duty_cycle when absent.
CavityDesign parse_design(const Json &doc);
CavityDesign load_design(const std::filesystem::path &path);
Json design_to_json(const CavityDesign &d);
// FNV-1a over the canonical design JSON, as 16 hex digits.
std::string design_hash(const CavityDesign &d);

Json index_model_to_json(const IndexModel &m);
Json sweep_settings_to_json(const SweepSettings &s);

// Calibration file written by `calibrate`; accepted back by every command.
struct CalibrationFile
{
    IndexModel index;
    EmitterModel emitter;
};
Json calibration_to_json(const CalibrationFile &c, const LossCalibration &loss,
                         const GuidedFractionCalibration &guided);
CalibrationFile load_calibration(const std::filesystem::path &path);

std::string spectrum_csv(const Spectrum &s);
std::string emission_csv(std::span<const EmissionSample> samples);
std::string sweep_csv(const SweepTable &t);
Json sweep_sidecar(const SweepTable &t);

Json fit_report(const ResonanceFit &fit, const std::optional<CouplingRegime> &regime);
Json kappa_sc_report(const KappaScFit &fit);
Json cqed_report(const CqedReport &r);
Json emission_report(const EmissionResult &e);

// Reads a sweep CSV back into rows (status and regime columns included).
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path &path);

std::string dump(const Json &j); // 2-space indent, trailing newline
void write_text(const std::filesystem::path &path, std::string_view text);

} // namespace ncfcav::io
