#include "nrq/report_json.hpp"

#include <fstream>

namespace nrq {

Json config_json(const std::map<std::string, std::string>& resolved) {
    Json j = Json::object();
    for (const auto& [key, value] : resolved)
        j[key] = value;
    return j;
}

namespace {

Json check_json(const HypothesisCheck& check) {
    Json j = Json::object();
    j["name"] = check.name;
    j["pass"] = check.pass;
    if (check.witness_t)
        j["witness_t"] = *check.witness_t;
    if (check.witness_index)
        j["witness_x"] = static_cast<long long>(*check.witness_index);
    j["detail"] = check.detail;
    return j;
}

Json roots_json(const RootPair& roots) {
    Json j = Json::object();
    j["status"] = to_string(roots.status);
    if (roots.status != RootStatus::no_root) {
        j["t_plus"] = roots.t_plus;
        j["t_minus"] = roots.t_minus;
    }
    return j;
}

} // namespace

Json hypothesis_report_json(const HypothesisReport& report) {
    Json j = Json::object();
    Json items = Json::array();
    for (const auto* check : report.items())
        items.push_back(check_json(*check));
    j["hypotheses"] = std::move(items);
    j["all_pass"] = report.all_pass();
    j["ar_satisfied"] = report.ar_satisfied;
    j["ar_detail"] = report.ar_detail;
    return j;
}

Json fiber_report_json(const FiberReport& report) {
    Json j = Json::object();
    j["t_n"] = report.t_n;
    j["lambda_n"] = report.lambda_n;
    j["t_e"] = report.t_e;
    j["lambda_e"] = report.lambda_e;
    j["roots_n"] = roots_json(report.roots_n);
    j["roots_e"] = roots_json(report.roots_e);
    return j;
}

Json extremal_json(const ExtremalEstimate& estimate) {
    Json j = Json::object();
    j["lambda_star"] = estimate.lambda_star;
    j["lambda_substar"] = estimate.lambda_substar;
    j["starts"] = estimate.starts;
    j["failed_starts"] = estimate.failed_starts;
    j["per_start_n"] = estimate.per_start_n;
    j["per_start_e"] = estimate.per_start_e;
    j["converged_n"] = estimate.converged_n;
    j["converged_e"] = estimate.converged_e;
    j["converged"] = estimate.converged;
    return j;
}

Json gap_json(const GapReport& gap) {
    Json j = Json::object();
    j["probes"] = gap.probes;
    j["violations_first_pass"] = gap.violations_first_pass;
    j["violations_second_pass"] = gap.violations_second_pass;
    j["floor_n"] = gap.floor_n;
    j["floor_e"] = gap.floor_e;
    j["converged"] = gap.converged;
    return j;
}

Json solve_result_json(const SolveResult& result,
                       const std::string& field_csv_name) {
    Json j = Json::object();
    j["branch"] = to_string(result.branch);
    j["lambda"] = result.lambda;
    j["j"] = result.j;
    j["j2_diag"] = result.j2_diag;
    j["residual"] = result.residual;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["trichotomy"] = to_string(result.trichotomy);
    j["field_csv_path"] = field_csv_name;
    return j;
}

Json checks_json(const std::vector<CheckResult>& checks) {
    Json items = Json::array();
    for (const auto& check : checks) {
        Json j = Json::object();
        j["name"] = check.name;
        j["pass"] = check.pass;
        j["detail"] = check.detail;
        items.push_back(std::move(j));
    }
    return items;
}

void write_report(const std::filesystem::path& path, const Json& report) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << report.dump(2) << "\n";
    if (!out)
        throw Error("write to " + path.string() + " failed");
}

} // namespace nrq
