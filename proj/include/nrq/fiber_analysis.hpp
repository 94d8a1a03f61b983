#pragma once

#include <vector>

#include "nrq/energy_functional.hpp"

namespace nrq {

enum class RootStatus { two_roots, tangent, no_root };

const char* to_string(RootStatus status);

// Roots of a fiber-level equation q(t) = lambda. For status two_roots,
// 0 < t_plus < t_max_point < t_minus; for tangent both roots equal the
// maximizer; for no_root the values are meaningless.
struct RootPair {
    RootStatus status = RootStatus::no_root;
    Real t_plus = 0.0;
    Real t_minus = 0.0;
};

struct FiberReport {
    Real t_n = 0.0;      // maximizer of q_n
    Real lambda_n = 0.0; // q_n(t_n)
    Real t_e = 0.0;      // maximizer of q_e
    Real lambda_e = 0.0; // q_e(t_e)
    RootPair roots_n;    // q_n(t) = lambda
    RootPair roots_e;    // q_e(t) = lambda
};

// Evaluates the two fiber maps along the ray through a fixed field,
//   q_n(t) = [t^{2-q} |u|_V^2 - t^{1-q} I_f(t)] / |u|_{q,a}^q,
//   q_e(t) = (q/|u|_{q,a}^q) [t^{2-q} |u|_V^2 / 2 - t^{-q} I_F(t)],
// with I_f(t) = integral of b f(tu) u and I_F(t) = integral of b F(tu).
// The u-dependent integrals are cached once, so repeated t-evaluations are a
// single pass over the grid with no transforms.
class FiberMap {
public:
    FiberMap(const ProblemSpec& spec, Field u);

    Real norm_v_sq() const { return norm_v_sq_; }
    Real qa_norm_q() const { return qa_norm_q_; }

    Real q_n(Real t) const;
    Real q_e(Real t) const;

    // J_lambda(t u) using the cached integrals (the spec's lambda).
    Real energy_along_ray(Real t) const;

    // J''_lambda(tu)(tu, tu) using the cached integrals.
    Real second_diag_along_ray(Real t) const;

    // J'_lambda(tu) tu using the cached integrals.
    Real pairing_along_ray(Real t) const;

    // Unique maximizer of q_n: solves (2-q)|u|_V^2 = integral b H(tu) u^2 by
    // bisection on a geometrically expanded bracket from t = 1.
    Real find_t_n(Real rel_tol = 1e-10) const;

    // Unique maximizer of q_e: same with G and target (2-q)|u|_V^2 / 2.
    Real find_t_e(Real rel_tol = 1e-10) const;

    RootPair nehari_roots(Real lambda, Real rel_tol = 1e-10) const;
    RootPair zero_energy_roots(Real lambda, Real rel_tol = 1e-10) const;

private:
    Real pairing_integral(Real t) const; // integral of b f(tu) u
    Real energy_integral(Real t) const;  // integral of b F(tu)
    Real second_integral(Real t) const;  // integral of b f'(tu) u^2
    Real h_integral(Real t) const;       // integral of b H(tu) u^2
    Real g_integral(Real t) const;       // integral of b G(tu) u^2

    Real solve_monotone(Real target, Real (FiberMap::*integral)(Real) const,
                        Real rel_tol, const char* label) const;
    RootPair roots_of(Real lambda, Real t_max_point, Real peak,
                      Real (FiberMap::*map)(Real) const, Real rel_tol,
                      const char* label) const;

    const ProblemSpec* spec_;
    Field u_;
    Field bu_;  // b u
    Field bu2_; // b u^2
    Real weight_ = 0.0;
    Real norm_v_sq_ = 0.0;
    Real qa_norm_q_ = 0.0;
    // For power sums every ray integral separates into precomputed moments
    // integral of b |u|^{p_i}, so t-evaluations cost O(#powers).
    std::vector<Real> power_moments_;
};

// R_n(u) = [|u|_V^2 - integral b f(u)u] / |u|_{q,a}^q. Level lambda encodes
// membership in the Nehari set: R_n(u) = lambda iff J'(u)u = 0.
Real rayleigh_n(const ProblemSpec& spec, const Field& u);

// R_e(u) = q [|u|_V^2/2 - integral b F(u)] / |u|_{q,a}^q; R_e(u) = lambda iff
// J_lambda(u) = 0.
Real rayleigh_e(const ProblemSpec& spec, const Field& u);

Real find_t_n(const ProblemSpec& spec, const Field& u);
Real find_t_e(const ProblemSpec& spec, const Field& u);

RootPair nehari_roots(const ProblemSpec& spec, const Field& u, Real lambda);
RootPair zero_energy_roots(const ProblemSpec& spec, const Field& u, Real lambda);

// Aggregates maximizers, extremal levels and both root families; enforces the
// proved orderings (t_n < t_e, lambda_e < lambda_n, root interleaving) before
// returning.
FiberReport fiber_report(const ProblemSpec& spec, const Field& u, Real lambda);

struct FiberSample {
    Real t = 0.0;
    Real q_n = 0.0;
    Real q_e = 0.0;
    Real j = 0.0;
};

// Log-spaced diagnostic table of (t, q_n, q_e, J_lambda(tu)).
std::vector<FiberSample> sample_fiber(const ProblemSpec& spec, const Field& u,
                                      Real t_min, Real t_max, int count);

void write_fiber_csv(const std::filesystem::path& path,
                     const std::vector<FiberSample>& rows);

} // namespace nrq
