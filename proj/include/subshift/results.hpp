/// @file results.hpp
/// @brief Result persistence: JSON-lines outcomes, summary JSON, CSV curves
/// and SVG plots. All outputs are deterministic functions of the results.

#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "subshift/power.hpp"
#include "subshift/sweeps.hpp"

namespace subshift::cli {

nlohmann::json outcome_to_json(const stats::TestOutcome& outcome);

/// One labeled block of results (the base power run, the type-I run, or one
/// sweep entry).
struct LabeledResult {
  std::string role;  // "power", "type1", "sweep:w=5", ...
  harness::PowerResult result;
};

void write_outcomes_jsonl(const std::filesystem::path& path,
                          const std::vector<LabeledResult>& blocks);

nlohmann::json curve_to_json(const harness::PowerCurve& curve);

/// {"alpha": a, "curves": {role: [points...]}}
nlohmann::json summary_to_json(const std::vector<LabeledResult>& blocks, double alpha);

void write_summary_json(const std::filesystem::path& path,
                        const std::vector<LabeledResult>& blocks, double alpha);

void write_curves_csv(const std::filesystem::path& path,
                      const std::vector<LabeledResult>& blocks);

/// Power curves per method with shaded Wilson bands; one SVG per block.
std::string render_curve_svg(const harness::PowerCurve& curve, const std::string& title);

/// Grouped bars of rejection rate per (m, method) with CI whiskers and the
/// alpha reference line.
std::string render_type1_svg(const harness::PowerCurve& curve, double alpha,
                             const std::string& title);

}  // namespace subshift::cli
