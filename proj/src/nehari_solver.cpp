#include "nrq/nehari_solver.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "nrq/fields.hpp"
#include "nrq/rng.hpp"

namespace nrq {

const char* to_string(Branch branch) {
    return branch == Branch::n_plus ? "N_plus" : "N_minus";
}

const char* to_string(Trichotomy label) {
    switch (label) {
    case Trichotomy::below_substar: return "below_substar";
    case Trichotomy::at_substar: return "at_substar";
    case Trichotomy::between: return "between";
    case Trichotomy::not_applicable: return "not_applicable";
    }
    return "?";
}

namespace {

Field normalized_v(const ProblemSpec& spec, const Field& w) {
    const Real nsq = v_norm_sq(spec.grid, spec.potential, w);
    if (!(nsq > 0.0))
        throw DomainError("cannot normalize a field with nonpositive V-norm");
    return w / std::sqrt(nsq);
}

struct Projection {
    Real t = 0.0;
    Real j = 0.0;
    bool ok = false;
};

// Project a unit-sphere point onto the requested branch: t^{n,+} (left root)
// for N+, t^{n,-} (right root) for N-.
Projection project(const FiberMap& fm, Real lambda, Branch branch) {
    Projection out;
    RootPair roots;
    try {
        roots = fm.nehari_roots(lambda);
    } catch (const BracketError&) {
        return out;
    }
    if (roots.status != RootStatus::two_roots)
        return out;
    out.t = branch == Branch::n_plus ? roots.t_plus : roots.t_minus;
    out.j = fm.energy_along_ray(out.t);
    out.ok = true;
    return out;
}

} // namespace

SolveResult solve_branch(const ProblemSpec& spec, Branch branch,
                         const Field& start, const SolveOptions& options) {
    if (!(options.lambda_star_est > 0.0))
        throw DomainError("solve_branch needs a positive lambda_star estimate");
    const Real lambda = spec.lambda;
    // The two-root projection exists for every nonzero field only below
    // lambda_star; at or past it the constrained minimization is not
    // available, so the solve is refused rather than attempted.
    if (lambda >= options.lambda_star_est -
                      1e-6 * std::max(Real(1.0), options.lambda_star_est)) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " is not inside the validity range "
            << "(0, lambda_star ~= " << options.lambda_star_est
            << "); the fiber maps lose their two-root structure there and the "
               "branch minimization is refused";
        throw SolveError(msg.str());
    }

    Field w = normalized_v(spec, start);
    FiberMap fm(spec, w);
    Projection proj = project(fm, lambda, branch);
    if (!proj.ok)
        throw SolveError("the start field has no two-root fiber structure at "
                         "lambda = " + std::to_string(lambda) +
                         "; pick a different start or a smaller lambda");

    SolveResult result;
    result.branch = branch;
    result.lambda = lambda;
    result.min_j2_ratio = std::numeric_limits<Real>::infinity();

    Real t = proj.t;
    Real j_current = proj.j;
    Field u = t * w;
    Real step = 1.0;
    const Real weight = spec.grid.cell_volume();

    auto record_iterate = [&](const FiberMap& map, Real t_now) {
        const Real usq = t_now * t_now; // |u|_V^2 = t^2 on the unit sphere
        result.max_pairing_ratio = std::max(
            result.max_pairing_ratio,
            std::abs(map.pairing_along_ray(t_now)) / usq);
        result.min_j2_ratio = std::min(
            result.min_j2_ratio,
            std::abs(map.second_diag_along_ray(t_now)) / usq);
    };
    record_iterate(fm, t);

    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        const Field r = residual_field(spec, u);
        // On the constraint J'(u)u = 0, so the radial component of r already
        // vanishes; the tangential norm is the full residual norm.
        const Real r_norm = std::sqrt(weight * (r * r).sum());
        const Real stop = std::min(options.tol * (1.0 + std::abs(j_current)),
                                   0.9e-6 * (1.0 + t));
        if (r_norm <= stop)
            break;

        SobolevGradient grad = precondition_residual(spec, r);
        if (grad.fallback)
            ++result.preconditioner_fallbacks;
        const Real radial = inner_product_v(spec.grid, spec.potential,
                                            grad.direction, w);
        Field g_tan = grad.direction - radial * w;
        if (!( (g_tan * r).sum() > 0.0 ))
            g_tan = r - ((r * w).sum() / (w * w).sum()) * w; // raw fallback

        bool accepted = false;
        Real h = step;
        for (int halving = 0; halving < 40 && !accepted; ++halving) {
            Field w_try;
            try {
                w_try = normalized_v(spec, w - h * g_tan);
            } catch (const DomainError&) {
                h *= 0.5;
                continue;
            }
            FiberMap fm_try(spec, w_try);
            const Projection p_try = project(fm_try, lambda, branch);
            if (!p_try.ok) {
                h *= 0.5; // root loss on a trial point: shrink and retry
                continue;
            }
            if (p_try.j <= j_current - 1e-14 * (1.0 + std::abs(j_current))) {
                if (p_try.j > j_current)
                    result.monotone = false;
                w = std::move(w_try);
                fm = std::move(fm_try);
                t = p_try.t;
                j_current = p_try.j;
                u = t * w;
                record_iterate(fm, t);
                step = std::min(h * 2.0, 10.0);
                accepted = true;
            } else {
                h *= 0.5;
            }
        }
        if (!accepted)
            break; // no strict decrease available; finalize below
    }

    result.iterations = iter;
    result.u = u;
    const FunctionalValue fv = evaluate(spec, u);
    result.j = fv.j;
    result.j2_diag = second_derivative_diag(spec, u);
    result.residual = l2_norm(spec.grid, residual_field(spec, u));
    const Real u_norm = t;
    result.converged = result.residual <= 1e-6 * (1.0 + u_norm);
    return result;
}

namespace {

SolveResult best_of_starts(const ProblemSpec& spec, Branch branch,
                           const std::vector<Field>& starts,
                           const SolveOptions& options) {
    std::vector<std::future<SolveResult>> futures;
    futures.reserve(starts.size());
    for (const Field& start : starts)
        futures.push_back(std::async(std::launch::async, [&, start]() {
            return solve_branch(spec, branch, start, options);
        }));

    std::vector<SolveResult> results;
    std::vector<std::string> failures;
    for (auto& f : futures) {
        try {
            results.push_back(f.get());
        } catch (const Error& err) {
            failures.emplace_back(err.what());
        }
    }
    int best = -1;
    for (int i = 0; i < static_cast<int>(results.size()); ++i) {
        if (!results[i].converged)
            continue;
        if (best < 0 || results[i].j < results[best].j)
            best = i;
    }
    if (best < 0) {
        // no converged start; surface the least-energy attempt if any
        for (int i = 0; i < static_cast<int>(results.size()); ++i)
            if (best < 0 || results[i].j < results[best].j)
                best = i;
        if (best >= 0)
            return results[best];
        std::ostringstream msg;
        msg << "all " << starts.size() << " (" << to_string(branch)
            << ") starts failed:";
        for (const auto& f : failures)
            msg << "\n  - " << f;
        throw SolveError(msg.str());
    }
    return results[best];
}

} // namespace

SolveResult solve_ground(const ProblemSpec& spec, int starts,
                         std::uint64_t seed, const SolveOptions& options,
                         const std::vector<Field>& extra_starts) {
    if (starts < 1)
        throw DomainError("solve_ground needs starts >= 1");
    const Grid& grid = spec.grid;
    std::vector<Field> fields;
    fields.push_back(gaussian_bump(grid, {0.0, 0.0}, grid.half_length / 6.0, 1.0));
    for (const Field& extra : extra_starts)
        fields.push_back(extra);
    std::uint64_t stream = 300;
    while (static_cast<int>(fields.size()) < starts) {
        Rng rng(Rng::derive(seed, stream++));
        fields.push_back(random_bump_field(grid, rng));
    }
    return best_of_starts(spec, Branch::n_plus, fields, options);
}

SolveResult solve_bound(const ProblemSpec& spec, int starts, std::uint64_t seed,
                        const SolveOptions& options,
                        const std::vector<Field>& extra_starts) {
    if (starts < 1)
        throw DomainError("solve_bound needs starts >= 1");
    const Grid& grid = spec.grid;
    std::vector<Field> fields;
    fields.push_back(signed_bump(grid, {0.0, 0.0}, grid.half_length / 6.0, 1.0));
    for (const Field& extra : extra_starts)
        fields.push_back(extra);
    std::uint64_t stream = 500;
    while (static_cast<int>(fields.size()) < starts) {
        Rng rng(Rng::derive(seed, stream++));
        Field bump = random_bump_field(grid, rng);
        if (rng.uniform() < 0.5) {
            const Field x = grid.coordinate(0);
            bump *= (x - rng.uniform(-0.3, 0.3) * grid.half_length);
        }
        fields.push_back(std::move(bump));
    }
    return best_of_starts(spec, Branch::n_minus, fields, options);
}

TrichotomyResult classify_trichotomy(const ProblemSpec& spec,
                                     const SolveResult& result,
                                     const ExtremalEstimate& extremals) {
    TrichotomyResult out;
    const FunctionalValue fv = evaluate(spec, result.u);
    out.scale = 0.5 * std::abs(fv.norm_v_sq) +
                (spec.lambda / spec.q) * std::abs(fv.norm_qa_q) +
                std::abs(fv.nl_energy);
    if (result.branch != Branch::n_minus) {
        out.label = Trichotomy::not_applicable;
        return out;
    }
    const Real band = 1e-3 * extremals.lambda_substar;
    const Real lambda = result.lambda;
    if (lambda < extremals.lambda_substar - band)
        out.label = Trichotomy::below_substar;
    else if (lambda <= extremals.lambda_substar + band)
        out.label = Trichotomy::at_substar;
    else
        out.label = Trichotomy::between;

    switch (out.label) {
    case Trichotomy::below_substar:
        out.sign_matches = result.j > 0.0;
        break;
    case Trichotomy::at_substar:
        out.sign_matches = std::abs(result.j) <= 1e-3 * out.scale;
        break;
    case Trichotomy::between:
        out.sign_matches = result.j < 0.0;
        break;
    case Trichotomy::not_applicable:
        break;
    }
    return out;
}

} // namespace nrq
