#pragma once

#include <json.hpp>
#include <string>

#include "npsig/screening.hpp"
#include "npsig/selection.hpp"
#include "npsig/simulation.hpp"
#include "npsig/sir.hpp"
#include "npsig/window_anova.hpp"

namespace npsig {

inline constexpr const char* kSchema = "npsig/1";
inline constexpr const char* kVersion = "0.1.0";

//! Report envelope shared by every command: schema tag, version, command
//! name and the fully resolved configuration that produced the result.
nlohmann::json report_envelope(const std::string& command,
                               const nlohmann::json& config);

nlohmann::json to_json(const test_result& r,
                       const std::vector<std::string>& adjustment_names);
nlohmann::json to_json(const screen_report& r, const dataset& ds);
nlohmann::json to_json(const sir_basis& b, const std::vector<std::string>& names);
nlohmann::json to_json(const selection_trace& t, const dataset& ds);
nlohmann::json to_json(const rejection_report& r);
nlohmann::json to_json(const selection_report& r);

//! Flattens a report into comma-separated key/value rows for --format csv.
std::string flatten_csv(const nlohmann::json& report);

}  // namespace npsig
