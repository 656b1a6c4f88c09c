#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbai/guarantees.hpp"
#include "fbai/instance.hpp"
#include "fbai/montecarlo.hpp"

namespace fbai {

/// {"means": [...], "label": "..."}; label omitted when empty.
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst);

/// {"algorithm", "rate", "j_min", "per_j": [...], "bounds": {"T": b}}.
nlohmann::json report_to_json(const GuaranteeReport& report);
/// Header `algorithm,j_min,rate,T,bound`; one row per (report, budget), or a
/// single row with empty T and bound when the report has no budgets.
void write_reports_csv(std::ostream& os, const std::vector<GuaranteeReport>& reports);

inline constexpr const char* kResultsHeader =
    "family,K,algorithm,T,runs,errors,error_rate,ci_low,ci_high,base_seed";

/// Rates are printed with 6 significant digits.
void write_results_csv(std::ostream& os, const std::vector<SimResult>& results);
/// Parses the format written above.  Throws std::runtime_error with the line
/// number on malformed input.
std::vector<SimResult> read_results_csv(std::istream& is);
nlohmann::json results_to_json(const std::vector<SimResult>& results);

}  // namespace fbai
