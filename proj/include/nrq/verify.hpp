#pragma once

#include <string>
#include <vector>

#include "nrq/config.hpp"

namespace nrq {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Runs the per-module invariant suite on one scenario: grid identities,
// nonlinearity structure, functional derivative checks, fiber identities and
// orderings, extremal gap audit, and one ground/bound solve pair. Deterministic
// given the config seed.
std::vector<CheckResult> run_verification(const ScenarioConfig& config);

} // namespace nrq
