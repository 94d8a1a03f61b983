#include "nrq/problem_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nrq/numerics.hpp"

namespace nrq {

Real ProblemSpec::critical_exponent() const {
    const Real d = static_cast<Real>(grid.dim);
    if (2.0 * grid.s >= d)
        return std::numeric_limits<Real>::infinity();
    return 2.0 * d / (d - 2.0 * grid.s);
}

ProblemSpec make_problem_spec(Grid grid, Real q, Real p, Real lambda,
                              Field potential, Field weight_a, Field weight_b,
                              Nonlinearity nl, Real potential_floor,
                              Real b_growth_c0, Real b_growth_alpha) {
    ProblemSpec spec;
    spec.grid = std::move(grid);
    spec.q = q;
    spec.p = p;
    spec.lambda = lambda;
    spec.potential = std::move(potential);
    spec.weight_a = std::move(weight_a);
    spec.weight_b = std::move(weight_b);
    spec.nl = std::move(nl);
    spec.potential_floor = potential_floor;
    spec.b_growth_c0 = b_growth_c0;
    spec.b_growth_alpha = b_growth_alpha;

    if (!(q > 1.0 && q < 2.0))
        throw DomainError("sublinear exponent q must lie in (1, 2), got " +
                          std::to_string(q));
    const Real crit = spec.critical_exponent();
    if (!(p > 2.0) || !(p < crit))
        throw DomainError("growth exponent p must lie in (2, " +
                          std::to_string(crit) + "), got " + std::to_string(p));
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError("lambda must be positive and finite");
    if (!(potential_floor >= 0.0))
        throw DomainError("declared potential bound B must be >= 0");
    if (!(b_growth_alpha > 1.0))
        throw DomainError("b-growth alpha must be > 1");
    if (!(b_growth_c0 > 0.0))
        throw DomainError("b-growth C0 must be > 0");

    const auto size = spec.grid.size();
    for (const auto* field : {&spec.potential, &spec.weight_a, &spec.weight_b}) {
        if (field->size() != size)
            throw DomainError("coefficient field size does not match the grid");
        if (!field->isFinite().all())
            throw DomainError("coefficient field has non-finite entries");
    }
    if ((spec.weight_a < 0.0).any())
        throw DomainError("weight a must be nonnegative");
    if (!(spec.weight_a.maxCoeff() > 0.0))
        throw DomainError("weight a must not vanish identically");
    if ((spec.weight_b < 1.0).any())
        throw DomainError("weight b must be >= 1 everywhere");
    if (spec.potential.minCoeff() < -potential_floor)
        throw DomainError("potential drops below its declared bound -B = -" +
                          std::to_string(potential_floor));
    return spec;
}

ProblemSpec with_lambda(const ProblemSpec& spec, Real lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError("lambda must be positive and finite");
    ProblemSpec copy = spec;
    copy.lambda = lambda;
    return copy;
}

std::vector<const HypothesisCheck*> HypothesisReport::items() const {
    return {&f1_growth,     &f2_limits, &f3_h_monotone,    &f4_strict,
            &b1_pointwise,  &a1_integrability, &v1_bound,  &v2_form_positive};
}

bool HypothesisReport::all_pass() const {
    for (const auto* check : items())
        if (!check->pass)
            return false;
    return true;
}

namespace {

std::string format_real(Real value) {
    std::ostringstream out;
    out.precision(6);
    out << value;
    return out.str();
}

// Log-spaced positive magnitudes in [1e-6, t_max].
std::vector<Real> sample_magnitudes(int count, Real t_max) {
    std::vector<Real> m(count);
    const Real lo = std::log(1e-6);
    const Real hi = std::log(t_max);
    for (int i = 0; i < count; ++i)
        m[i] = std::exp(lo + (hi - lo) * i / (count - 1));
    return m;
}

HypothesisCheck check_f1(const ProblemSpec& spec, const std::vector<Real>& mags) {
    HypothesisCheck check{.name = "f1_growth"};
    // Fit the envelope constant on |t| <= 0.1 t_max; the tail may not exceed
    // the fitted constant by more than 10%, otherwise the ratio is diverging
    // and no C can exist.
    const Real cutoff = 0.1 * mags.back();
    Real c_fit = 0.0, c_tail = 0.0, worst_t = 0.0;
    for (Real m : mags) {
        for (Real t : {m, -m}) {
            const Real rf = std::abs(spec.nl.f(t)) /
                            (1.0 + std::pow(std::abs(t), spec.p - 1.0));
            const Real rfp = std::abs(spec.nl.fprime(t)) /
                             (1.0 + std::pow(std::abs(t), spec.p - 2.0));
            const Real r = std::max(rf, rfp);
            if (m <= cutoff) {
                c_fit = std::max(c_fit, r);
            } else if (r > c_tail) {
                c_tail = r;
                worst_t = t;
            }
        }
    }
    check.detail = "fitted C = " + format_real(std::max(c_fit, c_tail));
    if (c_tail > 1.10 * c_fit && c_tail > 0.0) {
        check.pass = false;
        check.witness_t = worst_t;
        check.detail += "; envelope ratio grows from " + format_real(c_fit) +
                        " to " + format_real(c_tail) + " at the tail";
    }
    return check;
}

HypothesisCheck check_f2(const ProblemSpec& spec, const std::vector<Real>& mags) {
    HypothesisCheck check{.name = "f2_limits"};
    // sign: f(t) t >= 0 away from 0
    for (Real m : mags) {
        for (Real t : {m, -m}) {
            const Real ft = spec.nl.f(t) * t;
            if (ft < -1e-14 * (1.0 + std::abs(ft))) {
                check.pass = false;
                check.witness_t = t;
                check.detail = "f(t) t < 0 at t = " + format_real(t);
                return check;
            }
        }
    }
    auto ratio = [&](Real m) {
        return std::max(std::abs(spec.nl.f(m) / m), std::abs(spec.nl.f(-m) / m));
    };
    // origin: |f(t)/t| must shrink toward 0 across the two smallest decades
    const Real r_small = ratio(1e-6);
    const Real r_ref = ratio(1e-4);
    if (!(r_small <= std::max(0.9 * r_ref, 1e-12))) {
        check.pass = false;
        check.witness_t = 1e-6;
        check.detail = "f(t)/t does not vanish at the origin (|f/t| = " +
                       format_real(r_small) + " at t = 1e-6)";
        return check;
    }
    // infinity: |f(t)/t| must keep growing across the top decades
    const Real t_max = mags.back();
    Real prev = ratio(t_max / 100.0);
    for (Real m : {t_max / 10.0, t_max}) {
        const Real cur = ratio(m);
        if (!(cur > prev * 1.001)) {
            check.pass = false;
            check.witness_t = m;
            check.detail = "f(t)/t stops growing near t = " + format_real(m) +
                           " (ratio " + format_real(cur) + " after " +
                           format_real(prev) + ")";
            return check;
        }
        prev = cur;
    }
    check.detail = "sign, origin and infinity limits verified on samples";
    return check;
}

HypothesisCheck check_f3(const ProblemSpec& spec, const std::vector<Real>& mags) {
    HypothesisCheck check{.name = "f3_h_monotone"};
    for (int side = 0; side < 2; ++side) {
        const Real sign = side == 0 ? 1.0 : -1.0;
        Real prev = eval_H(spec.nl, spec.q, sign * mags.front());
        for (std::size_t i = 1; i < mags.size(); ++i) {
            const Real t = sign * mags[i];
            const Real cur = eval_H(spec.nl, spec.q, t);
            // moving away from 0 on either side must not decrease H(t) for
            // t > 0 / increase it for t < 0; H is sampled even in |t| here.
            const Real tol = 1e-10 * (std::abs(prev) + std::abs(cur) + 1e-30);
            if (cur < prev - tol) {
                check.pass = false;
                check.witness_t = t;
                check.detail = "H not monotone: H(" + format_real(t) + ") = " +
                               format_real(cur) + " < " + format_real(prev);
                return check;
            }
            prev = cur;
        }
    }
    check.detail = "H nondecreasing in |t| on both sides";
    return check;
}

HypothesisCheck check_f4(const ProblemSpec& spec, const std::vector<Real>& mags) {
    HypothesisCheck check{.name = "f4_strict"};
    for (Real m : mags) {
        for (Real t : {m, -m}) {
            const Real w = spec.nl.fprime(t) * t * t - spec.nl.f(t) * t;
            if (!(w > 0.0)) {
                check.pass = false;
                check.witness_t = t;
                check.detail = "f'(t)t^2 - f(t)t = " + format_real(w) +
                               " at t = " + format_real(t);
                return check;
            }
        }
    }
    check.detail = "f'(t)t^2 - f(t)t > 0 on all samples";
    return check;
}

HypothesisCheck check_b1(const ProblemSpec& spec) {
    HypothesisCheck check{.name = "b1_pointwise"};
    const Real c0 = spec.b_growth_c0;
    const Real inv_alpha = 1.0 / spec.b_growth_alpha;
    for (Eigen::Index i = 0; i < spec.grid.size(); ++i) {
        const Real b = spec.weight_b(i);
        const Real vp = std::max(spec.potential(i), 0.0);
        const Real bound = c0 * (1.0 + std::pow(vp, inv_alpha));
        if (b < 1.0 - 1e-12 || b > bound * (1.0 + 1e-12)) {
            check.pass = false;
            check.witness_index = i;
            check.detail = "b = " + format_real(b) + " vs bound " +
                           format_real(bound) + " at grid index " +
                           std::to_string(i);
            return check;
        }
    }
    check.detail = "b in [1, C0 (1 + (V+)^{1/alpha})] pointwise";
    return check;
}

HypothesisCheck check_a1(const ProblemSpec& spec) {
    HypothesisCheck check{.name = "a1_integrability"};
    const Real alpha0 = spec.p / (spec.p - spec.q);
    for (Eigen::Index i = 0; i < spec.grid.size(); ++i) {
        if (spec.weight_a(i) < 0.0) {
            check.pass = false;
            check.witness_index = i;
            check.detail = "a < 0 at grid index " + std::to_string(i);
            return check;
        }
    }
    const Real mass = integrate(spec.grid, spec.weight_a);
    const Real lp = integrate(spec.grid, spec.weight_a.pow(alpha0));
    if (!(mass > 0.0)) {
        check.pass = false;
        check.detail = "a vanishes identically";
        return check;
    }
    if (!std::isfinite(lp)) {
        check.pass = false;
        check.detail = "integral of a^{alpha0} is not finite";
        return check;
    }
    check.detail = "alpha0 = p/(p-q) = " + format_real(alpha0) +
                   ", integral of a^{alpha0} = " + format_real(lp);
    return check;
}

HypothesisCheck check_v1(const ProblemSpec& spec) {
    HypothesisCheck check{.name = "v1_bound"};
    Eigen::Index arg = 0;
    const Real vmin = spec.potential.minCoeff(&arg);
    if (vmin < -spec.potential_floor - 1e-12 * (1.0 + spec.potential_floor)) {
        check.pass = false;
        check.witness_index = arg;
        check.detail = "min V = " + format_real(vmin) + " below -B = -" +
                       format_real(spec.potential_floor);
        return check;
    }
    check.detail = "min V = " + format_real(vmin) + " >= -B";
    return check;
}

HypothesisCheck check_v2(const ProblemSpec& spec) {
    HypothesisCheck check{.name = "v2_form_positive"};
    const Grid& grid = spec.grid;
    const LinearOp apply = [&](const Field& v) {
        return Field(apply_fractional_laplacian(grid, v) + spec.potential * v);
    };
    const Real shift = spec.potential_floor + 1.0;
    const Field diag = grid.multipliers + shift;
    const LinearOp precondition = [diag](const Field& r) {
        return Field(r / diag);
    };
    const Real lambda_min = smallest_eigenvalue(apply, precondition, grid.size(),
                                                shift, 200, 1e-10, 20101);
    check.detail = "smallest eigenvalue of the V-form = " + format_real(lambda_min);
    if (!(lambda_min > 0.0)) {
        check.pass = false;
        check.detail += " (not positive)";
    }
    return check;
}

} // namespace

HypothesisReport check_hypotheses(const ProblemSpec& spec, int sample_count,
                                  Real t_max) {
    if (sample_count < 100)
        throw DomainError("hypothesis audit needs at least 100 samples");
    if (!(t_max > 1e-3) || !std::isfinite(t_max))
        throw DomainError("t_max must be finite and > 1e-3");
    const auto mags = sample_magnitudes(sample_count / 2, t_max);

    HypothesisReport report;
    report.f1_growth = check_f1(spec, mags);
    report.f2_limits = check_f2(spec, mags);
    report.f3_h_monotone = check_f3(spec, mags);
    report.f4_strict = check_f4(spec, mags);
    report.b1_pointwise = check_b1(spec);
    report.a1_integrability = check_a1(spec);
    report.v1_bound = check_v1(spec);
    report.v2_form_positive = check_v2(spec);

    // AR diagnostic: does f(t)t - theta F(t) stay >= 0 (with F > 0) for some
    // theta > 2 over the sampled range? Expected to fail for log-type growth.
    std::ostringstream ar;
    bool any_theta = false;
    for (Real theta : {2.1, 2.5, 3.0}) {
        Real worst = std::numeric_limits<Real>::infinity();
        bool f_positive = true;
        for (Real m : mags) {
            for (Real t : {m, -m}) {
                const Real big_f = eval_F(spec.nl, t);
                if (!(big_f > 0.0))
                    f_positive = false;
                worst = std::min(worst, spec.nl.f(t) * t - theta * big_f);
            }
        }
        const bool ok = f_positive && worst >= -1e-12 * (1.0 + std::abs(worst));
        any_theta = any_theta || ok;
        ar << "theta=" << theta << ": inf(ft - thetaF) = " << format_real(worst)
           << (ok ? " (holds)" : " (fails)") << "; ";
    }
    report.ar_satisfied = any_theta;
    report.ar_detail = ar.str();
    return report;
}

} // namespace nrq
