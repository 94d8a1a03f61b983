#include "nrq/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

#include "nrq/fields.hpp"
#include "nrq/report_json.hpp"

namespace nrq {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNoConvergence = 2;

struct CliOptions {
    std::string config_path;
    std::string out_dir;  // override
    std::uint64_t seed = 0;
    bool seed_set = false;
    int starts = 0;
    bool starts_set = false;
    bool no_timestamp = false;
    bool allow_any_s = false;
};

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buffer[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

void emit_error(const std::string& type, const std::string& message) {
    Json j = Json::object();
    j["error"] = type;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

ScenarioConfig load_config(const CliOptions& cli) {
    ScenarioConfig config = ScenarioConfig::parse_file(cli.config_path);
    if (cli.seed_set)
        config.seed = cli.seed;
    if (cli.starts_set)
        config.starts = cli.starts;
    if (!cli.out_dir.empty())
        config.out_dir = cli.out_dir;
    if (cli.allow_any_s)
        config.allow_any_s = true;
    return config;
}

std::filesystem::path prepare_out_dir(const ScenarioConfig& config) {
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

Json base_report(const char* command, const ScenarioConfig& config,
                 std::optional<Real> lambda_abs, bool no_timestamp) {
    Json report = Json::object();
    report["command"] = command;
    if (!no_timestamp)
        report["timestamp"] = iso_timestamp();
    report["config"] = config_json(config.resolved(lambda_abs));
    return report;
}

// lambda resolution; runs the extremal estimate only when a fraction is given.
struct LambdaResolution {
    Real lambda = 0.0;
    std::optional<ExtremalEstimate> estimate;
};

LambdaResolution resolve_lambda(const ScenarioConfig& config,
                                const ProblemSpec& probe_spec) {
    LambdaResolution out;
    if (config.lambda) {
        out.lambda = *config.lambda;
        return out;
    }
    const Real fraction = config.lambda_fraction.value_or(0.5);
    out.estimate = estimate_extremals(probe_spec, config.starts, config.seed,
                                      config.budget);
    out.lambda = fraction * out.estimate->lambda_star;
    return out;
}

int command_hypotheses(const ScenarioConfig& config, bool no_timestamp) {
    const ProblemSpec spec = build_problem_spec(config, config.lambda.value_or(1.0));
    const HypothesisReport report =
        check_hypotheses(spec, config.hypo_samples, config.hypo_tmax);

    Json j = base_report("hypotheses", config, std::nullopt, no_timestamp);
    j["report"] = hypothesis_report_json(report);
    const auto dir = prepare_out_dir(config);
    write_report(dir / "report.json", j);

    for (const auto* check : report.items())
        std::cout << (check->pass ? "[pass] " : "[FAIL] ") << check->name << ": "
                  << check->detail << "\n";
    std::cout << "[info] ar_satisfied = " << (report.ar_satisfied ? "true" : "false")
              << "\n";
    std::cout << "report: " << (dir / "report.json").string() << "\n";
    return report.all_pass() ? kExitOk : kExitValidation;
}

int command_fiber(const ScenarioConfig& config, bool no_timestamp) {
    ProblemSpec spec = build_problem_spec(config, config.lambda.value_or(1.0));
    const LambdaResolution res = resolve_lambda(config, spec);
    spec = with_lambda(spec, res.lambda);

    Field u;
    if (!config.fiber_field_csv.empty()) {
        u = read_field_csv(config.fiber_field_csv, spec.grid.size());
    } else {
        Rng rng(Rng::derive(config.seed, 0xF1B));
        u = random_bump_field(spec.grid, rng);
    }

    const FiberReport report = fiber_report(spec, u, res.lambda);
    Real t_min = config.fiber_t_min;
    Real t_max = config.fiber_t_max;
    if (!(t_min > 0.0))
        t_min = report.t_n / 50.0;
    if (!(t_max > t_min))
        t_max = report.t_e * 50.0;
    const auto rows = sample_fiber(spec, u, t_min, t_max, config.fiber_count);

    const auto dir = prepare_out_dir(config);
    write_fiber_csv(dir / "fiber.csv", rows);
    write_field_csv(dir / "field_fiber.csv", u);

    Json j = base_report("fiber", config, res.lambda, no_timestamp);
    j["lambda"] = res.lambda;
    j["fiber"] = fiber_report_json(report);
    j["csv"] = "fiber.csv";
    j["field_csv_path"] = "field_fiber.csv";
    write_report(dir / "report.json", j);

    std::cout << "t_n = " << report.t_n << ", lambda_n = " << report.lambda_n
              << ", t_e = " << report.t_e << ", lambda_e = " << report.lambda_e
              << "\n"
              << "roots_n: " << to_string(report.roots_n.status)
              << ", roots_e: " << to_string(report.roots_e.status) << "\n"
              << "report: " << (dir / "report.json").string() << "\n";
    return kExitOk;
}

int command_extremal(const ScenarioConfig& config, bool no_timestamp) {
    const ProblemSpec spec = build_problem_spec(config, config.lambda.value_or(1.0));
    ExtremalEstimate estimate =
        estimate_extremals(spec, config.starts, config.seed, config.budget);
    const GapReport gap = certify_gap(spec, estimate, config.probes, config.seed);

    const auto dir = prepare_out_dir(config);
    write_field_csv(dir / "field_argmin_n.csv", estimate.argmin_n);
    write_field_csv(dir / "field_argmin_e.csv", estimate.argmin_e);

    Json j = base_report("extremal", config, std::nullopt, no_timestamp);
    j["extremal"] = extremal_json(estimate);
    j["extremal"]["argmin_n_csv"] = "field_argmin_n.csv";
    j["extremal"]["argmin_e_csv"] = "field_argmin_e.csv";
    j["gap"] = gap_json(gap);
    write_report(dir / "report.json", j);

    std::cout << "lambda_star ~= " << estimate.lambda_star
              << ", lambda_substar ~= " << estimate.lambda_substar
              << " (upper-bound estimates, " << config.probes
              << " audit probes)\n"
              << "report: " << (dir / "report.json").string() << "\n";
    return (estimate.converged && gap.converged) ? kExitOk : kExitNoConvergence;
}

int command_solve(const ScenarioConfig& config, bool no_timestamp) {
    ProblemSpec spec = build_problem_spec(config, config.lambda.value_or(1.0));

    ExtremalEstimate estimate =
        estimate_extremals(spec, config.starts, config.seed, config.budget);
    Real lambda = config.lambda ? *config.lambda
                                : config.lambda_fraction.value_or(0.5) *
                                      estimate.lambda_star;
    if (lambda >= estimate.lambda_star -
                      1e-6 * std::max(Real(1.0), estimate.lambda_star)) {
        emit_error("validity_range",
                   "lambda = " + format_full(lambda) +
                       " is not inside (0, lambda_star ~= " +
                       format_full(estimate.lambda_star) +
                       "); the fiber maps lose their two-root structure there "
                       "and the Nehari minimization is refused");
        return kExitValidation;
    }
    spec = with_lambda(spec, lambda);

    SolveOptions options;
    options.max_iter = config.solve_max_iter;
    options.tol = config.solve_tol;
    options.lambda_star_est = estimate.lambda_star;

    SolveResult ground = solve_ground(spec, config.solve_starts, config.seed,
                                      options, {estimate.argmin_n});
    SolveResult bound =
        solve_bound(spec, config.solve_starts, config.seed, options);
    const TrichotomyResult trichotomy =
        classify_trichotomy(spec, bound, estimate);
    bound.trichotomy = trichotomy.label;

    const auto dir = prepare_out_dir(config);
    write_field_csv(dir / "field_ground.csv", ground.u);
    write_field_csv(dir / "field_bound.csv", bound.u);

    Json j = base_report("solve", config, lambda, no_timestamp);
    j["lambda"] = lambda;
    j["extremal"] = extremal_json(estimate);
    j["ground"] = solve_result_json(ground, "field_ground.csv");
    j["bound"] = solve_result_json(bound, "field_bound.csv");
    Json comparison = Json::object();
    const Real distance = std::sqrt(
        v_norm_sq(spec.grid, spec.potential, ground.u - bound.u));
    comparison["distance_v"] = distance;
    comparison["ground_below_bound"] = ground.j < bound.j;
    comparison["trichotomy_sign_matches"] = trichotomy.sign_matches;
    j["comparison"] = comparison;
    write_report(dir / "report.json", j);

    std::cout << "ground: J = " << ground.j << ", J'' = " << ground.j2_diag
              << ", residual = " << ground.residual
              << (ground.converged ? "" : " (NOT converged)") << "\n"
              << "bound:  J = " << bound.j << ", J'' = " << bound.j2_diag
              << ", residual = " << bound.residual
              << (bound.converged ? "" : " (NOT converged)")
              << ", trichotomy = " << to_string(bound.trichotomy) << "\n"
              << "report: " << (dir / "report.json").string() << "\n";
    return (ground.converged && bound.converged) ? kExitOk : kExitNoConvergence;
}

int command_verify(const ScenarioConfig& config, bool no_timestamp) {
    const auto checks = run_verification(config);
    bool all_pass = true;
    std::size_t width = 0;
    for (const auto& check : checks)
        width = std::max(width, check.name.size());
    for (const auto& check : checks) {
        all_pass = all_pass && check.pass;
        std::printf("%-6s %-*s %s\n", check.pass ? "[pass]" : "[FAIL]",
                    static_cast<int>(width), check.name.c_str(),
                    check.detail.c_str());
    }

    Json j = base_report("verify", config, std::nullopt, no_timestamp);
    j["checks"] = checks_json(checks);
    j["all_pass"] = all_pass;
    const auto dir = prepare_out_dir(config);
    write_report(dir / "report.json", j);
    std::cout << "report: " << (dir / "report.json").string() << "\n";
    return all_pass ? kExitOk : kExitValidation;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"Fibering-map / Nehari-manifold solver for a fractional "
                 "Schrodinger equation with concave-convex right-hand side"};
    app.require_subcommand(1);

    CliOptions cli;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", cli.config_path, "scenario config file")
            ->required();
        sub->add_option("--seed", cli.seed, "override the config seed")
            ->each([&](const std::string&) { cli.seed_set = true; });
        sub->add_option("--starts", cli.starts, "override the config starts")
            ->each([&](const std::string&) { cli.starts_set = true; });
        sub->add_option("--out", cli.out_dir, "output directory");
        sub->add_flag("--no-timestamp", cli.no_timestamp,
                      "omit the timestamp from reports (for byte-stable runs)");
        sub->add_flag("--allow-any-s", cli.allow_any_s,
                      "accept fractional orders outside (0, min{1, d/2})");
    };

    CLI::App* hypotheses = app.add_subcommand(
        "hypotheses", "audit the structural hypotheses of the scenario");
    CLI::App* fiber = app.add_subcommand(
        "fiber", "fiber-map report and CSV samples along one ray");
    CLI::App* extremal = app.add_subcommand(
        "extremal", "estimate the extremal values lambda_star, lambda_substar");
    CLI::App* solve = app.add_subcommand(
        "solve", "compute the ground state (N+) and bound state (N-)");
    CLI::App* verify = app.add_subcommand(
        "verify", "run the full invariant suite on the scenario");
    for (CLI::App* sub : {hypotheses, fiber, extremal, solve, verify})
        add_common(sub);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return kExitOk;
        }
        emit_error("usage", err.what());
        return kExitValidation;
    }

    try {
        const ScenarioConfig config = load_config(cli);
        if (hypotheses->parsed())
            return command_hypotheses(config, cli.no_timestamp);
        if (fiber->parsed())
            return command_fiber(config, cli.no_timestamp);
        if (extremal->parsed())
            return command_extremal(config, cli.no_timestamp);
        if (solve->parsed())
            return command_solve(config, cli.no_timestamp);
        return command_verify(config, cli.no_timestamp);
    } catch (const ConfigError& err) {
        emit_error("config", err.what());
        return kExitValidation;
    } catch (const DomainError& err) {
        emit_error("validation", err.what());
        return kExitValidation;
    } catch (const SolveError& err) {
        emit_error("solver", err.what());
        return kExitNoConvergence;
    } catch (const Error& err) {
        emit_error("runtime", err.what());
        return kExitNoConvergence;
    } catch (const std::exception& err) {
        emit_error("internal", err.what());
        return kExitNoConvergence;
    }
}

} // namespace nrq
