#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "nrq/problem_model.hpp"

namespace nrq {

// Flat `key = value` scenario file with `#` comments. Parsing is total:
// unknown keys, duplicates and malformed values fail with line-numbered
// diagnostics. Every knob has a resolved value after parsing, so a config can
// be echoed into reports and re-run bit-identically.
struct ScenarioConfig {
    // problem
    int d = 1;
    int n = 256;
    Real box_half_length = 10.0; // L
    Real s = 0.4;
    Real q = 1.5;
    Real p = 4.0;
    std::optional<Real> lambda;          // absolute lambda
    std::optional<Real> lambda_fraction; // lambda as a fraction of lambda_star
    std::string nonlinearity = "power_sum"; // power_sum | log_power
    std::vector<Real> powers = {4.0};
    std::string potential = "constant"; // constant | harmonic
    Real potential_v0 = 1.0;
    Real potential_c = 0.0;
    Real v_bound = 0.0; // declared B with V >= -B
    std::string weight_a = "constant"; // constant | gaussian
    Real weight_a_value = 1.0;
    Real weight_a_width = 1.0;
    std::string weight_b = "constant"; // constant | one_plus_vplus
    Real weight_b_value = 1.0;
    Real b1_c0 = 1.0;
    Real b1_alpha = 2.0;
    bool allow_any_s = false;

    // solver / search knobs
    std::uint64_t seed = 1;
    int starts = 8;
    int budget = 40; // extremal descent sweeps per start
    int probes = 200;
    int solve_starts = 3;
    int solve_max_iter = 2000;
    Real solve_tol = 1e-7;
    int hypo_samples = 400;
    Real hypo_tmax = 1e5;
    int fiber_count = 200;
    Real fiber_t_min = 0.0; // 0 = auto around [t_n/50, 50 t_e]
    Real fiber_t_max = 0.0;
    std::string fiber_field_csv; // optional field to analyze; default = seeded bump
    std::string out_dir = "out";

    static ScenarioConfig parse_file(const std::filesystem::path& path);
    static ScenarioConfig parse_text(const std::string& text,
                                     const std::string& origin);

    // Every effective key as strings, insertion-ordered for stable echoes.
    // `out` is excluded (an I/O location, not run semantics) and lambda is
    // echoed in absolute form once resolved.
    std::map<std::string, std::string> resolved(std::optional<Real> lambda_abs)
        const;
};

// Grid + coefficient fields + nonlinearity from a config. The lambda value
// must already be resolved (absolute).
ProblemSpec build_problem_spec(const ScenarioConfig& config, Real lambda);

std::string format_full(Real value); // %.17g

} // namespace nrq
