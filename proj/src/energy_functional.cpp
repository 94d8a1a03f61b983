#include "nrq/energy_functional.hpp"

#include <cmath>

#include "nrq/numerics.hpp"

namespace nrq {

namespace {

// sign(u) |u|^{q-1}, the concave term of the strong form; 0 at u = 0 (q > 1).
Field signed_power(const Field& u, Real exponent) {
    Field out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        out(i) = std::copysign(detail::pow_abs(std::abs(u(i)), exponent), u(i));
    return out;
}

} // namespace

FunctionalValue evaluate(const ProblemSpec& spec, const Field& u) {
    const Grid& grid = spec.grid;
    const Real w = grid.cell_volume();
    const Field frac = apply_fractional_laplacian(grid, u);

    FunctionalValue fv;
    Real qa = 0.0, energy = 0.0, pairing = 0.0, second = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const Real ui = u(i);
        qa += spec.weight_a(i) * std::pow(std::abs(ui), spec.q);
        const Real b = spec.weight_b(i);
        energy += b * spec.nl.antiderivative(ui);
        pairing += b * spec.nl.f(ui) * ui;
        second += b * spec.nl.fprime(ui) * ui * ui;
    }
    fv.norm_v_sq = w * ((u * frac).sum() + (spec.potential * u * u).sum());
    fv.norm_qa_q = w * qa;
    fv.nl_energy = w * energy;
    fv.nl_pairing = w * pairing;
    fv.nl_second = w * second;
    fv.j = 0.5 * fv.norm_v_sq - (spec.lambda / spec.q) * fv.norm_qa_q -
           fv.nl_energy;
    return fv;
}

Real derivative_pairing(const ProblemSpec& spec, const Field& u) {
    const FunctionalValue fv = evaluate(spec, u);
    return fv.norm_v_sq - spec.lambda * fv.norm_qa_q - fv.nl_pairing;
}

Real second_derivative_diag(const ProblemSpec& spec, const Field& u) {
    const FunctionalValue fv = evaluate(spec, u);
    return fv.norm_v_sq - spec.lambda * (spec.q - 1.0) * fv.norm_qa_q -
           fv.nl_second;
}

Field residual_field(const ProblemSpec& spec, const Field& u) {
    const Field frac = apply_fractional_laplacian(spec.grid, u);
    Field f_of_u(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        f_of_u(i) = spec.nl.f(u(i));
    return frac + spec.potential * u -
           spec.lambda * spec.weight_a * signed_power(u, spec.q - 1.0) -
           spec.weight_b * f_of_u;
}

SobolevGradient precondition_residual(const ProblemSpec& spec,
                                      const Field& residual) {
    const Grid& grid = spec.grid;
    const Real shift = spec.potential_floor + 1.0;
    const Field v_plus = spec.potential.max(0.0);
    const LinearOp apply = [&](const Field& v) {
        return Field(apply_fractional_laplacian(grid, v) + (v_plus + shift) * v);
    };
    const Field diag = grid.multipliers + shift;
    const LinearOp fourier_part = [&](const Field& r) { return Field(r / diag); };

    SobolevGradient out;
    CgResult cg = conjugate_gradient(apply, fourier_part, residual, 1e-10, 50);
    out.iterations = cg.iterations;
    out.direction = std::move(cg.x);
    const Real pairing = (out.direction * residual).sum();
    if (!(pairing >= 0.0)) {
        out.fallback = true;
        out.direction = residual;
    }
    return out;
}

SobolevGradient sobolev_gradient(const ProblemSpec& spec, const Field& u) {
    return precondition_residual(spec, residual_field(spec, u));
}

} // namespace nrq
