#include "nrq/numerics.hpp"

#include <cmath>

#include "nrq/errors.hpp"
#include "nrq/rng.hpp"

namespace nrq {

CgResult conjugate_gradient(const LinearOp& apply, const LinearOp& precondition,
                            const Field& rhs, Real rel_tol, int max_iter) {
    CgResult result;
    result.x = Field::Zero(rhs.size());
    Field r = rhs;
    const Real rhs_norm = std::sqrt((rhs * rhs).sum());
    if (rhs_norm == 0.0) {
        result.converged = true;
        return result;
    }
    Field z = precondition ? precondition(r) : r;
    Field p = z;
    Real rz = (r * z).sum();
    for (int k = 0; k < max_iter; ++k) {
        const Field ap = apply(p);
        const Real pap = (p * ap).sum();
        if (!(pap > 0.0))
            break; // operator not positive along p; bail with current iterate
        const Real alpha = rz / pap;
        result.x += alpha * p;
        r -= alpha * ap;
        result.iterations = k + 1;
        const Real rnorm = std::sqrt((r * r).sum());
        result.relative_residual = rnorm / rhs_norm;
        if (result.relative_residual <= rel_tol) {
            result.converged = true;
            return result;
        }
        z = precondition ? precondition(r) : r;
        const Real rz_next = (r * z).sum();
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return result;
}

namespace {

Field deterministic_start(Eigen::Index size, std::uint64_t seed) {
    Rng rng(Rng::derive(seed, 0xe16));
    Field v(size);
    for (Eigen::Index i = 0; i < size; ++i)
        v(i) = 1.0 + 0.25 * rng.normal();
    return v;
}

} // namespace

Real smallest_eigenvalue(const LinearOp& apply, const LinearOp& precondition,
                         Eigen::Index size, Real shift, int max_iter, Real tol,
                         std::uint64_t seed) {
    const LinearOp shifted = [&](const Field& v) { return apply(v) + shift * v; };
    Field v = deterministic_start(size, seed);
    v /= std::sqrt((v * v).sum());
    Real rayleigh = (v * apply(v)).sum();
    for (int k = 0; k < max_iter; ++k) {
        CgResult solve = conjugate_gradient(shifted, precondition, v, 1e-10, 400);
        Field w = solve.x;
        const Real wnorm = std::sqrt((w * w).sum());
        if (!(wnorm > 0.0))
            throw Error("inverse power iteration produced a zero vector");
        w /= wnorm;
        const Real next = (w * apply(w)).sum();
        const bool settled = std::abs(next - rayleigh) <=
                             tol * (1.0 + std::abs(next));
        v = w;
        rayleigh = next;
        if (settled && k >= 2)
            break;
    }
    return rayleigh;
}

std::vector<Field> lowest_eigenmodes(const LinearOp& apply,
                                     const LinearOp& precondition,
                                     Eigen::Index size, Real shift, int count,
                                     int max_iter, Real tol,
                                     std::uint64_t seed) {
    if (count < 1)
        throw DomainError("eigenmode count must be >= 1");
    count = static_cast<int>(std::min<Eigen::Index>(count, size));
    const LinearOp shifted = [&](const Field& v) { return apply(v) + shift * v; };

    Eigen::MatrixXd basis(size, count);
    Rng rng(Rng::derive(seed, 0xe17));
    for (int j = 0; j < count; ++j)
        for (Eigen::Index i = 0; i < size; ++i)
            basis(i, j) = rng.normal();

    auto orthonormalize = [&]() {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
        basis = qr.householderQ() * Eigen::MatrixXd::Identity(size, count);
    };
    orthonormalize();

    Eigen::VectorXd values = Eigen::VectorXd::Zero(count);
    for (int k = 0; k < max_iter; ++k) {
        for (int j = 0; j < count; ++j) {
            const Field rhs = basis.col(j).array();
            basis.col(j) = conjugate_gradient(shifted, precondition, rhs, 1e-10, 400)
                               .x.matrix();
        }
        orthonormalize();
        // Rayleigh-Ritz in the current subspace.
        Eigen::MatrixXd reduced(count, count);
        Eigen::MatrixXd applied(size, count);
        for (int j = 0; j < count; ++j)
            applied.col(j) = apply(basis.col(j).array()).matrix();
        reduced = basis.transpose() * applied;
        reduced = 0.5 * (reduced + reduced.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(reduced);
        basis = (basis * ritz.eigenvectors()).eval();
        const Eigen::VectorXd next = ritz.eigenvalues();
        const bool settled =
            ((next - values).cwiseAbs().maxCoeff() <=
             tol * (1.0 + next.cwiseAbs().maxCoeff()));
        values = next;
        if (settled && k >= 2)
            break;
    }

    std::vector<Field> modes;
    modes.reserve(count);
    for (int j = 0; j < count; ++j)
        modes.push_back(basis.col(j).array());
    return modes;
}

namespace {

Real simpson_rule(Real fa, Real fm, Real fb, Real a, Real b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

Real simpson_recurse(const std::function<Real(Real)>& f, Real a, Real b,
                     Real fa, Real fm, Real fb, Real whole, Real tol,
                     int depth) {
    const Real m = 0.5 * (a + b);
    const Real lm = 0.5 * (a + m);
    const Real rm = 0.5 * (m + b);
    const Real flm = f(lm);
    const Real frm = f(rm);
    const Real left = simpson_rule(fa, flm, fm, a, m);
    const Real right = simpson_rule(fm, frm, fb, m, b);
    const Real delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

Real adaptive_simpson(const std::function<Real(Real)>& f, Real a, Real b,
                      Real tol) {
    if (a == b)
        return 0.0;
    const Real fa = f(a);
    const Real fb = f(b);
    const Real fm = f(0.5 * (a + b));
    const Real whole = simpson_rule(fa, fm, fb, a, b);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace nrq
