#pragma once

#include <json.hpp>

#include "nrq/nehari_solver.hpp"
#include "nrq/verify.hpp"

namespace nrq {

// Reports keep insertion order so byte-identical emission is easy to reason
// about; numbers rely on the serializer's exact round-trip formatting.
using Json = nlohmann::ordered_json;

Json config_json(const std::map<std::string, std::string>& resolved);
Json hypothesis_report_json(const HypothesisReport& report);
Json fiber_report_json(const FiberReport& report);
Json extremal_json(const ExtremalEstimate& estimate);
Json gap_json(const GapReport& gap);
Json solve_result_json(const SolveResult& result,
                       const std::string& field_csv_name);
Json checks_json(const std::vector<CheckResult>& checks);

void write_report(const std::filesystem::path& path, const Json& report);

} // namespace nrq
