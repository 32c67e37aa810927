#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "steinb/harness.hpp"

namespace steinb {

using json = nlohmann::ordered_json;

/// Finite values as numbers, infinities as "inf" / "-inf", NaN as "nan".
json number_to_json(double v);
double number_from_json(const json& j);

/// Shortest decimal string that reads back to the same double.
std::string format_number(double v);

json to_json(const IdentityCheck& c);
json to_json(const BoundReport& r);
json to_json(const ScenarioResult& r);
json to_json(const TableRow& row);

ScenarioResult scenario_result_from_json(const json& j);

std::string emit_json(const std::vector<ScenarioResult>& results);
std::string emit_csv(const std::vector<ScenarioResult>& results);
std::string emit_markdown(const std::vector<ScenarioResult>& results);

std::string emit_table_json(const std::vector<TableRow>& rows);
std::string emit_table_csv(const std::vector<TableRow>& rows);
std::string emit_table_markdown(const std::vector<TableRow>& rows);

/// One JSON object per non-blank line; '#' starts a comment line.
std::vector<ScenarioSpec> parse_scenarios(std::istream& in);
std::vector<ScenarioSpec> parse_scenario_file(const std::string& path);
ScenarioSpec scenario_from_json(const json& j);
json to_json(const ScenarioSpec& s);

} // namespace steinb
