#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nrq/types.hpp"

namespace nrq {

using LinearOp = std::function<Field(const Field&)>;

struct CgResult {
    Field x;
    int iterations = 0;
    Real relative_residual = 0.0;
    bool converged = false;
};

// Preconditioned conjugate gradient for an SPD operator, started at zero.
// `precondition` applies an SPD approximate inverse (identity if empty).
CgResult conjugate_gradient(const LinearOp& apply, const LinearOp& precondition,
                            const Field& rhs, Real rel_tol, int max_iter);

// Smallest eigenvalue of a symmetric operator A (weights cancel, so this is
// the infimum of the quadratic form over unit-l2 vectors). Uses power
// iteration on (A + shift I)^{-1}; shift must make A + shift I positive
// definite. Inner solves are matrix-free CG with the given preconditioner.
Real smallest_eigenvalue(const LinearOp& apply, const LinearOp& precondition,
                         Eigen::Index size, Real shift, int max_iter, Real tol,
                         std::uint64_t seed);

// Lowest `count` eigenmodes of a symmetric operator by block inverse
// iteration with Rayleigh-Ritz extraction. Modes come back l2-orthonormal,
// ordered by eigenvalue.
std::vector<Field> lowest_eigenmodes(const LinearOp& apply,
                                     const LinearOp& precondition,
                                     Eigen::Index size, Real shift, int count,
                                     int max_iter, Real tol,
                                     std::uint64_t seed);

// Adaptive Simpson quadrature of a scalar function on [a, b].
Real adaptive_simpson(const std::function<Real(Real)>& f, Real a, Real b,
                      Real tol);

} // namespace nrq
