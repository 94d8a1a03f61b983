#include "nrq/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nrq/fields.hpp"

namespace nrq {

std::string format_full(Real value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

struct RawConfig {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;
    std::string origin;

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        const auto it = lines.find(key);
        const std::string at =
            it == lines.end() ? origin : origin + ":" + std::to_string(it->second);
        throw ConfigError(at + ": " + why);
    }
};

RawConfig tokenize(const std::string& text, const std::string& origin) {
    RawConfig raw;
    raw.origin = origin;
    std::istringstream stream(text);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_number) +
                              ": expected `key = value`, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ":" + std::to_string(line_number) +
                              ": empty key or value");
        if (raw.values.count(key))
            throw ConfigError(origin + ":" + std::to_string(line_number) +
                              ": duplicate key '" + key + "' (first at line " +
                              std::to_string(raw.lines[key]) + ")");
        raw.values[key] = value;
        raw.lines[key] = line_number;
    }
    return raw;
}

class Reader {
public:
    explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

    bool has(const std::string& key) {
        if (raw_.values.count(key)) {
            used_.insert(key);
            return true;
        }
        return false;
    }

    std::string str(const std::string& key, const std::string& fallback) {
        return has(key) ? raw_.values.at(key) : fallback;
    }

    Real real(const std::string& key, Real fallback) {
        if (!has(key))
            return fallback;
        return parse_real(key, raw_.values.at(key));
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key))
            return fallback;
        const std::string& v = raw_.values.at(key);
        try {
            std::size_t pos = 0;
            const long value = std::stol(v, &pos);
            if (pos != v.size())
                raw_.fail(key, "trailing characters in integer '" + v + "'");
            return static_cast<int>(value);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            raw_.fail(key, "not an integer: '" + v + "'");
        }
    }

    std::uint64_t uint64(const std::string& key, std::uint64_t fallback) {
        if (!has(key))
            return fallback;
        const std::string& v = raw_.values.at(key);
        try {
            std::size_t pos = 0;
            const unsigned long long value = std::stoull(v, &pos);
            if (pos != v.size())
                raw_.fail(key, "trailing characters in integer '" + v + "'");
            return value;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            raw_.fail(key, "not an unsigned integer: '" + v + "'");
        }
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key))
            return fallback;
        const std::string& v = raw_.values.at(key);
        if (v == "true" || v == "1")
            return true;
        if (v == "false" || v == "0")
            return false;
        raw_.fail(key, "expected true/false, got '" + v + "'");
    }

    std::vector<Real> real_list(const std::string& key,
                                std::vector<Real> fallback) {
        if (!has(key))
            return fallback;
        const std::string& v = raw_.values.at(key);
        std::vector<Real> values;
        std::istringstream stream(v);
        std::string item;
        while (std::getline(stream, item, ','))
            values.push_back(parse_real(key, trim(item)));
        if (values.empty())
            raw_.fail(key, "empty list");
        return values;
    }

    void finish() const {
        for (const auto& [key, value] : raw_.values)
            if (!used_.count(key))
                raw_.fail(key, "unknown key '" + key + "'");
    }

private:
    Real parse_real(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const Real value = std::stod(v, &pos);
            if (pos != v.size())
                raw_.fail(key, "trailing characters in number '" + v + "'");
            if (!std::isfinite(value))
                raw_.fail(key, "non-finite number");
            return value;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            raw_.fail(key, "not a number: '" + v + "'");
        }
    }

    RawConfig raw_;
    std::set<std::string> used_;
};

} // namespace

ScenarioConfig ScenarioConfig::parse_text(const std::string& text,
                                          const std::string& origin) {
    Reader reader(tokenize(text, origin));
    ScenarioConfig cfg;
    cfg.d = reader.integer("d", cfg.d);
    cfg.n = reader.integer("n", cfg.n);
    cfg.box_half_length = reader.real("L", cfg.box_half_length);
    cfg.s = reader.real("s", cfg.s);
    cfg.q = reader.real("q", cfg.q);
    cfg.p = reader.real("p", cfg.p);
    if (reader.has("lambda"))
        cfg.lambda = reader.real("lambda", 0.0);
    if (reader.has("lambda_fraction"))
        cfg.lambda_fraction = reader.real("lambda_fraction", 0.0);
    cfg.nonlinearity = reader.str("nonlinearity", cfg.nonlinearity);
    cfg.powers = reader.real_list("powers", cfg.powers);
    cfg.potential = reader.str("potential", cfg.potential);
    cfg.potential_v0 = reader.real("potential_v0", cfg.potential_v0);
    cfg.potential_c = reader.real("potential_c", cfg.potential_c);
    cfg.v_bound = reader.real("v_bound", cfg.v_bound);
    cfg.weight_a = reader.str("weight_a", cfg.weight_a);
    cfg.weight_a_value = reader.real("weight_a_value", cfg.weight_a_value);
    cfg.weight_a_width = reader.real("weight_a_width", cfg.weight_a_width);
    cfg.weight_b = reader.str("weight_b", cfg.weight_b);
    cfg.weight_b_value = reader.real("weight_b_value", cfg.weight_b_value);
    cfg.b1_c0 = reader.real("b1_c0", cfg.b1_c0);
    cfg.b1_alpha = reader.real("b1_alpha", cfg.b1_alpha);
    cfg.allow_any_s = reader.boolean("allow_any_s", cfg.allow_any_s);
    cfg.seed = reader.uint64("seed", cfg.seed);
    cfg.starts = reader.integer("starts", cfg.starts);
    cfg.budget = reader.integer("budget", cfg.budget);
    cfg.probes = reader.integer("probes", cfg.probes);
    cfg.solve_starts = reader.integer("solve_starts", cfg.solve_starts);
    cfg.solve_max_iter = reader.integer("solve_max_iter", cfg.solve_max_iter);
    cfg.solve_tol = reader.real("solve_tol", cfg.solve_tol);
    cfg.hypo_samples = reader.integer("hypo_samples", cfg.hypo_samples);
    cfg.hypo_tmax = reader.real("hypo_tmax", cfg.hypo_tmax);
    cfg.fiber_count = reader.integer("fiber_count", cfg.fiber_count);
    cfg.fiber_t_min = reader.real("fiber_t_min", cfg.fiber_t_min);
    cfg.fiber_t_max = reader.real("fiber_t_max", cfg.fiber_t_max);
    cfg.fiber_field_csv = reader.str("fiber_field_csv", cfg.fiber_field_csv);
    cfg.out_dir = reader.str("out", cfg.out_dir);
    reader.finish();

    if (cfg.lambda && cfg.lambda_fraction)
        throw ConfigError(origin +
                          ": give either lambda or lambda_fraction, not both");
    if (cfg.nonlinearity != "power_sum" && cfg.nonlinearity != "log_power")
        throw ConfigError(origin + ": nonlinearity must be power_sum or "
                                   "log_power, got '" + cfg.nonlinearity + "'");
    if (cfg.potential != "constant" && cfg.potential != "harmonic")
        throw ConfigError(origin + ": potential must be constant or harmonic");
    if (cfg.weight_a != "constant" && cfg.weight_a != "gaussian")
        throw ConfigError(origin + ": weight_a must be constant or gaussian");
    if (cfg.weight_b != "constant" && cfg.weight_b != "one_plus_vplus")
        throw ConfigError(origin +
                          ": weight_b must be constant or one_plus_vplus");
    return cfg;
}

ScenarioConfig ScenarioConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_text(text.str(), path.string());
}

std::map<std::string, std::string> ScenarioConfig::resolved(
    std::optional<Real> lambda_abs) const {
    std::map<std::string, std::string> keys;
    keys["d"] = std::to_string(d);
    keys["n"] = std::to_string(n);
    keys["L"] = format_full(box_half_length);
    keys["s"] = format_full(s);
    keys["q"] = format_full(q);
    keys["p"] = format_full(p);
    if (lambda_abs)
        keys["lambda"] = format_full(*lambda_abs);
    else if (lambda)
        keys["lambda"] = format_full(*lambda);
    else if (lambda_fraction)
        keys["lambda_fraction"] = format_full(*lambda_fraction);
    keys["nonlinearity"] = nonlinearity;
    std::string list;
    for (std::size_t i = 0; i < powers.size(); ++i)
        list += (i ? "," : "") + format_full(powers[i]);
    keys["powers"] = list;
    keys["potential"] = potential;
    keys["potential_v0"] = format_full(potential_v0);
    keys["potential_c"] = format_full(potential_c);
    keys["v_bound"] = format_full(v_bound);
    keys["weight_a"] = weight_a;
    keys["weight_a_value"] = format_full(weight_a_value);
    keys["weight_a_width"] = format_full(weight_a_width);
    keys["weight_b"] = weight_b;
    keys["weight_b_value"] = format_full(weight_b_value);
    keys["b1_c0"] = format_full(b1_c0);
    keys["b1_alpha"] = format_full(b1_alpha);
    keys["allow_any_s"] = allow_any_s ? "true" : "false";
    keys["seed"] = std::to_string(seed);
    keys["starts"] = std::to_string(starts);
    keys["budget"] = std::to_string(budget);
    keys["probes"] = std::to_string(probes);
    keys["solve_starts"] = std::to_string(solve_starts);
    keys["solve_max_iter"] = std::to_string(solve_max_iter);
    keys["solve_tol"] = format_full(solve_tol);
    keys["hypo_samples"] = std::to_string(hypo_samples);
    keys["hypo_tmax"] = format_full(hypo_tmax);
    keys["fiber_count"] = std::to_string(fiber_count);
    keys["fiber_t_min"] = format_full(fiber_t_min);
    keys["fiber_t_max"] = format_full(fiber_t_max);
    if (!fiber_field_csv.empty())
        keys["fiber_field_csv"] = fiber_field_csv;
    return keys;
}

ProblemSpec build_problem_spec(const ScenarioConfig& config, Real lambda) {
    Grid grid = build_grid(config.d, config.n, config.box_half_length, config.s,
                           config.allow_any_s);

    Field r_sq = Field::Zero(grid.size());
    for (int axis = 0; axis < grid.dim; ++axis) {
        const Field x = grid.coordinate(axis);
        r_sq += x * x;
    }

    Field potential;
    if (config.potential == "constant")
        potential = constant_field(grid, config.potential_v0);
    else
        potential = config.potential_v0 + config.potential_c * r_sq;

    Field a;
    if (config.weight_a == "constant")
        a = constant_field(grid, config.weight_a_value);
    else
        a = config.weight_a_value *
            (-r_sq / (2.0 * config.weight_a_width * config.weight_a_width)).exp();

    Field b;
    if (config.weight_b == "constant")
        b = constant_field(grid, config.weight_b_value);
    else
        b = config.weight_b_value *
            (1.0 + potential.max(0.0).pow(1.0 / config.b1_alpha));

    Nonlinearity nl = config.nonlinearity == "log_power"
                          ? Nonlinearity::log_power()
                          : Nonlinearity::power_sum(config.powers);

    return make_problem_spec(std::move(grid), config.q, config.p, lambda,
                             std::move(potential), std::move(a), std::move(b),
                             std::move(nl), config.v_bound, config.b1_c0,
                             config.b1_alpha);
}

} // namespace nrq
