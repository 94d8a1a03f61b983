#pragma once

#include <cstdint>

#include "nrq/fiber_analysis.hpp"

namespace nrq {

// Certified-upper-bound estimates of the two extremal values
//   lambda_star    = inf over nonzero u of max_t q_n(t; u),
//   lambda_substar = inf over nonzero u of max_t q_e(t; u).
// Both functionals are 0-homogeneous, so the search runs on the unit V-sphere.
// The reported values are the best local minima found by multistart descent;
// they are upper bounds of the true infima, audited by certify_gap.
struct ExtremalEstimate {
    Real lambda_star = 0.0;
    Real lambda_substar = 0.0;
    Field argmin_n; // normalized witness of lambda_star
    Field argmin_e; // normalized witness of lambda_substar
    int starts = 0;
    int failed_starts = 0;
    std::vector<Real> per_start_n; // best value per start (NaN if dropped)
    std::vector<Real> per_start_e;
    std::vector<bool> converged_n; // improvement criterion met within budget
    std::vector<bool> converged_e;
    bool converged = false;
};

// Multistart derivative-free direction-set descent of w -> Lambda(w/|w|_V).
// Starts are the lowest eigenmodes of the V-form plus random Gaussian bumps;
// `budget` caps the number of descent sweeps per start (>= 10). Starts run
// concurrently; the result is deterministic given (seed, starts).
ExtremalEstimate estimate_extremals(const ProblemSpec& spec, int starts,
                                    std::uint64_t seed, int budget);

struct GapReport {
    int probes = 0;
    int violations_first_pass = 0;
    int violations_second_pass = 0;
    Real floor_n = 0.0;
    Real floor_e = 0.0;
    bool converged = true;
};

// Probe audit: samples random fields and asserts Lambda_n(probe) >=
// lambda_star - tol and Lambda_e(probe) >= lambda_substar - tol with
// tol = 1e-6 * value. Violations lower the estimate (and replace its witness)
// and trigger one re-run; repeated violations flag the estimate non-converged.
GapReport certify_gap(const ProblemSpec& spec, ExtremalEstimate& estimate,
                      int probes, std::uint64_t seed);

// Lambda_n(u) and Lambda_e(u) at full tolerance (exposed for probes/tests).
Real extremal_level_n(const ProblemSpec& spec, const Field& u);
Real extremal_level_e(const ProblemSpec& spec, const Field& u);

} // namespace nrq
