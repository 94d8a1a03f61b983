#pragma once

#include "nrq/problem_model.hpp"

namespace nrq {

// All scalar pieces of J_lambda at one field:
//   j = norm_v_sq/2 - (lambda/q) norm_qa_q - nl_energy.
struct FunctionalValue {
    Real j = 0.0;
    Real norm_v_sq = 0.0;  // |u|_V^2
    Real norm_qa_q = 0.0;  // integral of a |u|^q
    Real nl_energy = 0.0;  // integral of b F(u)
    Real nl_pairing = 0.0; // integral of b f(u) u
    Real nl_second = 0.0;  // integral of b f'(u) u^2
};

FunctionalValue evaluate(const ProblemSpec& spec, const Field& u);

// J'(u) u = norm_v_sq - lambda norm_qa_q - nl_pairing.
Real derivative_pairing(const ProblemSpec& spec, const Field& u);

// J''(u)(u,u) = norm_v_sq - lambda (q-1) norm_qa_q - nl_second.
Real second_derivative_diag(const ProblemSpec& spec, const Field& u);

// Strong-form defect (-Lap)^s u + V u - lambda a sign(u)|u|^{q-1} - b f(u).
Field residual_field(const ProblemSpec& spec, const Field& u);

struct SobolevGradient {
    Field direction;
    bool fallback = false; // preconditioner rejected, raw residual returned
    int iterations = 0;
};

// Preconditioned descent direction: ((-Lap)^s + V+ + B + 1)^{-1} applied to
// the residual. The solve is CG with the Fourier-diagonal part as
// preconditioner, capped at 50 iterations; if the result fails the descent
// pairing test the raw residual is returned and flagged.
SobolevGradient sobolev_gradient(const ProblemSpec& spec, const Field& u);

// Same preconditioner applied to an arbitrary residual-like field.
SobolevGradient precondition_residual(const ProblemSpec& spec,
                                      const Field& residual);

} // namespace nrq
