#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nrq/nonlinearity.hpp"
#include "nrq/spectral_grid.hpp"

namespace nrq {

// Everything defining the equation
//   (-Lap)^s u + V(x) u = lambda a(x) |u|^{q-2} u + b(x) f(u)
// on the discretized box, plus the declared constants used by the hypothesis
// audit: B with V >= -B, and (C0, alpha) with b <= C0 (1 + (V^+)^{1/alpha}).
struct ProblemSpec {
    Grid grid;
    Real q = 1.5;      // sublinear exponent, 1 < q < 2
    Real p = 4.0;      // growth exponent, 2 < p < 2d/(d-2s)
    Real lambda = 0.5; // parameter of the concave term, > 0
    Field potential;   // V, may change sign
    Field weight_a;    // a >= 0, not identically 0
    Field weight_b;    // b >= 1
    Nonlinearity nl;
    Real potential_floor = 0.0; // B
    Real b_growth_c0 = 1.0;     // C0
    Real b_growth_alpha = 2.0;  // alpha > 1

    Real critical_exponent() const; // 2d/(d-2s); +inf when 2s >= d
};

ProblemSpec make_problem_spec(Grid grid, Real q, Real p, Real lambda,
                              Field potential, Field weight_a, Field weight_b,
                              Nonlinearity nl, Real potential_floor = 0.0,
                              Real b_growth_c0 = 1.0, Real b_growth_alpha = 2.0);

ProblemSpec with_lambda(const ProblemSpec& spec, Real lambda);

struct HypothesisCheck {
    std::string name;
    bool pass = true;
    std::optional<Real> witness_t;           // offending sample, t-based checks
    std::optional<Eigen::Index> witness_index; // offending grid point
    std::string detail;
};

struct HypothesisReport {
    HypothesisCheck f1_growth;
    HypothesisCheck f2_limits;
    HypothesisCheck f3_h_monotone;
    HypothesisCheck f4_strict;
    HypothesisCheck b1_pointwise;
    HypothesisCheck a1_integrability;
    HypothesisCheck v1_bound;
    HypothesisCheck v2_form_positive;
    bool ar_satisfied = false; // diagnostic, not a pass/fail hypothesis
    std::string ar_detail;

    std::vector<const HypothesisCheck*> items() const;
    bool all_pass() const;
};

// Sampling-based audit of the structural hypotheses. Samples log-spaced t in
// +-[1e-6, t_max]; grid-based checks run pointwise. Never throws on a failed
// hypothesis: failures are reported with witnesses. The Ambrosetti-Rabinowitz
// diagnostic scans inf over samples of f(t)t - theta F(t), theta in
// {2.1, 2.5, 3}.
HypothesisReport check_hypotheses(const ProblemSpec& spec, int sample_count,
                                  Real t_max);

} // namespace nrq
