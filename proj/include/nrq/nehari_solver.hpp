#pragma once

#include "nrq/extremal_search.hpp"

namespace nrq {

enum class Branch { n_plus, n_minus };
enum class Trichotomy { below_substar, at_substar, between, not_applicable };

const char* to_string(Branch branch);
const char* to_string(Trichotomy label);

struct SolveResult {
    Field u;             // the projected point t w on the chosen branch
    Real lambda = 0.0;
    Real j = 0.0;        // J_lambda(u)
    Real j2_diag = 0.0;  // J''_lambda(u)(u,u)
    Real residual = 0.0; // L2 norm of the strong-form residual
    Branch branch = Branch::n_plus;
    Trichotomy trichotomy = Trichotomy::not_applicable;
    int iterations = 0;
    bool converged = false;

    // iteration trace, read by the invariant checks
    Real max_pairing_ratio = 0.0;  // max |J'(u)u| / |u|_V^2 over accepted iterates
    Real min_j2_ratio = 0.0;       // min |J''(u)(u,u)| / |u|_V^2 over accepted iterates
    bool monotone = true;          // J nonincreasing along accepted steps
    int preconditioner_fallbacks = 0;
};

struct SolveOptions {
    int max_iter = 2000;
    Real tol = 1e-7;           // tangential-gradient stop, relative to 1 + |J|
    Real lambda_star_est = 0.0; // validity threshold; required
};

// Minimize J_lambda over one Nehari branch by descent on the unit V-sphere:
// each iterate w is projected to t w with t the branch root of q_n(t) =
// lambda, and descended along the tangentially projected preconditioned
// gradient with a step-halving line search (strict J decrease only).
// Refuses lambda at or above the lambda_star estimate.
SolveResult solve_branch(const ProblemSpec& spec, Branch branch,
                         const Field& start, const SolveOptions& options);

// Multistart ground-state solve: N+ branch from positive Gaussian bumps plus
// any extra start fields; returns the converged result of least energy.
SolveResult solve_ground(const ProblemSpec& spec, int starts,
                         std::uint64_t seed, const SolveOptions& options,
                         const std::vector<Field>& extra_starts = {});

// Multistart bound-state solve: N- branch from sign-changing seeds.
SolveResult solve_bound(const ProblemSpec& spec, int starts, std::uint64_t seed,
                        const SolveOptions& options,
                        const std::vector<Field>& extra_starts = {});

struct TrichotomyResult {
    Trichotomy label = Trichotomy::not_applicable;
    bool sign_matches = true; // sign(J) agrees with the label
    Real scale = 0.0;         // |J| band scale (sum of energy-part magnitudes)
};

// Places lambda relative to the lambda_substar estimate (band 1e-3 relative)
// and cross-checks the sign of J at the N- minimizer against the label.
TrichotomyResult classify_trichotomy(const ProblemSpec& spec,
                                     const SolveResult& result,
                                     const ExtremalEstimate& extremals);

} // namespace nrq
