#pragma once

#include <string>

#include "json.hpp"

#include "ulln/domain.hpp"
#include "ulln/simulate.hpp"
#include "ulln/study.hpp"

namespace ulln {

// Mean specs:
//   {"kind":"poisson","lambda":..,"T":..}
//   {"kind":"power","beta":..,"T":..}
//   {"kind":"zero","T":..}
//   {"kind":"latd-series","process":{..latd process..},"grid":256,"kmax":20,"tol":1e-8}
MeanModel parse_mean_spec(const nlohmann::json& j);

// Intensity families, flat form: "w" names the builtin, coefficients beside:
//   {"w":"constant","a":1}, {"w":"last-linear","a":1,"b":1},
//   {"w":"time-ramp","a":0,"b":2}, {"w":"product","a":1,"b":.5,"c":.5}
// "sup_bound" may override the family's computed bound.
IntensityModel parse_intensity_spec(const nlohmann::json& j, double horizon);

// Process specs:
//   {"kind":"poisson","lambda":..,"T":..}
//   {"kind":"poisson-fn","w":..family..,"T":..}
//   {"kind":"latd","w":..family..,"sup_bound":..,"T":..}
ProcessSpec parse_process_spec(const nlohmann::json& j);

StudyConfig parse_study_config(const nlohmann::json& j);

// CLI argument helpers: inline JSON (starts with '{') or a file path.
nlohmann::json load_spec_arg(const std::string& arg);
MeanModel mean_from_arg(const std::string& arg);
ProcessSpec process_from_arg(const std::string& arg);
StudyConfig study_config_from_file(const std::string& path);

// Deterministic re-serialization of a process spec (used for hashing and
// provenance records).
std::string process_to_string(const ProcessSpec& spec);

} // namespace ulln
