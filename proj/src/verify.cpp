#include "nrq/verify.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "nrq/fields.hpp"
#include "nrq/nehari_solver.hpp"

namespace nrq {

namespace {

struct Suite {
    std::vector<CheckResult> results;

    void run(const std::string& name, const std::function<std::string()>& body) {
        CheckResult r;
        r.name = name;
        try {
            r.detail = body();
            r.pass = true;
        } catch (const std::exception& err) {
            r.pass = false;
            r.detail = err.what();
        }
        results.push_back(std::move(r));
    }
};

[[noreturn]] void fail(const std::string& why) { throw Error(why); }

void expect(bool ok, const std::string& why) {
    if (!ok)
        fail(why);
}

std::string num(Real v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

Real fd_energy_derivative(const ProblemSpec& spec, const Field& u,
                          const Field& phi, Real eps) {
    const Real plus = evaluate(spec, u + eps * phi).j;
    const Real minus = evaluate(spec, u - eps * phi).j;
    return (plus - minus) / (2.0 * eps);
}

} // namespace

std::vector<CheckResult> run_verification(const ScenarioConfig& config) {
    Suite suite;
    const std::uint64_t seed = config.seed;

    // Build with a placeholder lambda; fiber/solver checks swap in the values
    // they need once the extremal estimates are known.
    ProblemSpec spec = build_problem_spec(config, config.lambda.value_or(1.0));
    const Grid& grid = spec.grid;

    suite.run("grid.parseval_nonneg", [&] {
        Rng rng(Rng::derive(seed, 1));
        Real min_ratio = std::numeric_limits<Real>::infinity();
        for (int k = 0; k < 50; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const Real quad = integrate(grid, u * apply_fractional_laplacian(grid, u));
            const Real scale = integrate(grid, u * u);
            expect(quad >= -1e-10 * scale, "fractional form negative on a random field");
            min_ratio = std::min(min_ratio, quad / scale);
        }
        const Field flat = constant_field(grid, 2.0);
        const Real on_flat =
            std::abs(integrate(grid, flat * apply_fractional_laplacian(grid, flat)));
        expect(on_flat <= 1e-10 * integrate(grid, flat * flat),
               "constants are not annihilated");
        return "nonnegative on 50 random fields, zero on constants";
    });

    suite.run("grid.standard_laplacian_smoke", [&] {
        Grid classical = build_grid(grid.dim, grid.points_per_axis,
                                    grid.half_length, 1.0, true);
        const Real k = 2.0 * std::numbers::pi / grid.half_length; // mode 2
        const Field mode = (k * classical.coordinate(0)).cos();
        const Field applied = apply_fractional_laplacian(classical, mode);
        const Real err = (applied - k * k * mode).abs().maxCoeff();
        expect(err <= 1e-8 * k * k, "s = 1 multiplier does not reproduce -u''");
        return "s = 1 reproduces the spectral Laplacian on an eigenmode";
    });

    suite.run("grid.inner_product_symmetric_bilinear", [&] {
        Rng rng(Rng::derive(seed, 2));
        for (int k = 0; k < 20; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const Field v = random_smooth_field(grid, rng);
            const Real uv = inner_product_v(grid, spec.potential, u, v);
            const Real vu = inner_product_v(grid, spec.potential, v, u);
            const Real scale = std::sqrt(std::abs(v_norm_sq(grid, spec.potential, u) *
                                                  v_norm_sq(grid, spec.potential, v))) +
                               1e-30;
            expect(std::abs(uv - vu) <= 1e-12 * scale, "inner product not symmetric");
            const Real lin = inner_product_v(grid, spec.potential, u + 2.0 * v, v) -
                             uv - 2.0 * inner_product_v(grid, spec.potential, v, v);
            expect(std::abs(lin) <= 1e-10 * scale, "inner product not bilinear");
        }
        return "symmetric and bilinear on 20 random pairs";
    });

    suite.run("model.f_t_dominates_qF", [&] {
        for (int i = 0; i <= 200; ++i) {
            const Real t = std::copysign(
                std::exp(std::log(1e-5) + (std::log(50.0) - std::log(1e-5)) * (i % 101) / 100.0),
                i <= 100 ? 1.0 : -1.0);
            const Real lhs = spec.nl.f(t) * t;
            const Real rhs = spec.q * eval_F(spec.nl, t);
            expect(lhs >= rhs - 1e-12 * (std::abs(lhs) + std::abs(rhs)),
                   "f(t) t < q F(t) at t = " + num(t));
        }
        return "f(t) t >= q F(t) on sampled t";
    });

    suite.run("model.G_H_monotone_strict", [&] {
        Real prev_h = 0.0, prev_g = 0.0;
        for (int i = 0; i <= 120; ++i) {
            const Real t = std::exp(std::log(1e-4) + (std::log(100.0) - std::log(1e-4)) * i / 120.0);
            const Real h = eval_H(spec.nl, spec.q, t);
            const Real g = eval_G(spec.nl, spec.q, t);
            if (i > 0) {
                expect(h > prev_h, "H not strictly increasing at t = " + num(t));
                expect(g > prev_g, "G not strictly increasing at t = " + num(t));
            }
            expect(std::abs(eval_H(spec.nl, spec.q, -t) - h) <= 1e-12 * (1.0 + std::abs(h)),
                   "H not even for the odd bundled nonlinearity");
            prev_h = h;
            prev_g = g;
        }
        return "G and H strictly increasing in |t| on samples";
    });

    suite.run("model.antiderivative_matches_quadrature", [&] {
        Real worst = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const Real t = -10.0 + 0.5 * i;
            const Real analytic = eval_F(spec.nl, t);
            const Real numeric = integrate_f_numeric(spec.nl, t);
            worst = std::max(worst, std::abs(analytic - numeric));
        }
        expect(worst <= 1e-9, "analytic F deviates from quadrature by " + num(worst));
        return "max |F_analytic - F_quadrature| = " + num(worst) + " on |t| <= 10";
    });

    suite.run("model.hypotheses", [&] {
        const HypothesisReport report =
            check_hypotheses(spec, config.hypo_samples, config.hypo_tmax);
        for (const auto* check : report.items())
            expect(check->pass, check->name + " failed: " + check->detail);
        return std::string("all structural hypotheses pass; AR diagnostic: ") +
               (report.ar_satisfied ? "satisfied" : "not satisfied");
    });

    suite.run("energy.decomposition_identity", [&] {
        Rng rng(Rng::derive(seed, 3));
        for (int k = 0; k < 20; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const FunctionalValue fv = evaluate(spec, u);
            const Real rebuilt = 0.5 * fv.norm_v_sq -
                                 (spec.lambda / spec.q) * fv.norm_qa_q - fv.nl_energy;
            expect(std::abs(rebuilt - fv.j) <=
                       1e-12 * (std::abs(fv.norm_v_sq) + std::abs(fv.norm_qa_q) +
                                std::abs(fv.nl_energy) + 1e-30),
                   "energy parts do not rebuild j");
        }
        return "j rebuilt from parts to 1e-12 relative, 20 fields";
    });

    suite.run("energy.directional_derivative_fd", [&] {
        Rng rng(Rng::derive(seed, 4));
        Real worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const Field u = random_smooth_field(grid, rng);
            Field phi = random_smooth_field(grid, rng);
            const Field r = residual_field(spec, u);
            Real pairing = integrate(grid, r * phi);
            // keep the test conditioned: skip near-orthogonal draws
            int guard = 0;
            while (std::abs(pairing) <
                       1e-3 * l2_norm(grid, r) * l2_norm(grid, phi) &&
                   guard++ < 8) {
                phi = random_smooth_field(grid, rng);
                pairing = integrate(grid, r * phi);
            }
            const Real eps = 1e-5 * (1.0 + l2_norm(grid, u)) /
                             (1.0 + l2_norm(grid, phi));
            const Real fd = fd_energy_derivative(spec, u, phi, eps);
            const Real rel = std::abs(fd - pairing) / std::max(std::abs(pairing), 1e-12);
            worst = std::max(worst, rel);
        }
        expect(worst <= 1e-5, "finite-difference mismatch " + num(worst));
        return "worst relative error " + num(worst) + " over 20 pairs";
    });

    suite.run("energy.second_derivative_fd", [&] {
        Rng rng(Rng::derive(seed, 5));
        Real worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const Real eps = 1e-4;
            const Real j0 = evaluate(spec, u).j;
            const Real jp = evaluate(spec, (1.0 + eps) * u).j;
            const Real jm = evaluate(spec, (1.0 - eps) * u).j;
            const Real fd = (jp - 2.0 * j0 + jm) / (eps * eps);
            const Real exact = second_derivative_diag(spec, u);
            worst = std::max(worst, std::abs(fd - exact) /
                                        std::max(std::abs(exact), 1e-10));
        }
        expect(worst <= 1e-4, "second-derivative mismatch " + num(worst));
        return "worst relative error " + num(worst) + " over 10 fields";
    });

    suite.run("energy.preconditioner_descent_pairing", [&] {
        Rng rng(Rng::derive(seed, 6));
        for (int k = 0; k < 20; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const Field r = residual_field(spec, u);
            const SobolevGradient g = precondition_residual(spec, r);
            expect(integrate(grid, g.direction * r) >= 0.0,
                   "descent pairing negative");
            expect(!g.fallback, "preconditioner fell back on a smooth field");
        }
        return "pairing >= 0 on 20 random fields, no fallbacks";
    });

    // --- fiber / extremal / solver checks need the extremal estimates ---

    ExtremalEstimate est;
    suite.run("extremal.estimate_and_gap", [&] {
        est = estimate_extremals(spec, config.starts, seed, config.budget);
        const GapReport gap = certify_gap(spec, est, config.probes, seed);
        expect(est.lambda_substar > 0.0, "lambda_substar not positive");
        expect(est.lambda_substar < est.lambda_star, "extremal gap not strict");
        expect(gap.converged, "probe audit failed twice");
        expect(gap.violations_first_pass == 0,
               "probe audit found " + std::to_string(gap.violations_first_pass) +
                   " violations");
        return "lambda_star ~= " + num(est.lambda_star) +
               ", lambda_substar ~= " + num(est.lambda_substar) + ", " +
               std::to_string(config.probes) + " probes clean";
    });
    if (!suite.results.back().pass)
        return suite.results; // everything below needs the estimates

    const Real lambda_fiber = 0.5 * est.lambda_substar;
    const ProblemSpec spec_fiber = with_lambda(spec, lambda_fiber);

    suite.run("extremal.sphere_restriction_lossless", [&] {
        Rng rng(Rng::derive(seed, 7));
        for (int k = 0; k < 10; ++k) {
            const Field w = 3.7 * random_smooth_field(grid, rng);
            const Real raw = extremal_level_n(spec, w);
            const Field unit = w / std::sqrt(v_norm_sq(grid, spec.potential, w));
            const Real normalized = extremal_level_n(spec, unit);
            expect(std::abs(raw - normalized) <= 1e-9 * std::abs(raw),
                   "normalization changed Lambda_n");
        }
        return "Lambda_n invariant under V-normalization, 10 probes";
    });

    suite.run("extremal.two_root_regimes", [&] {
        Rng rng(Rng::derive(seed, 8));
        for (int k = 0; k < 10; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const FiberMap fm(spec_fiber, u);
            expect(fm.nehari_roots(lambda_fiber).status == RootStatus::two_roots,
                   "missing Nehari roots below lambda_substar");
            expect(fm.zero_energy_roots(lambda_fiber).status == RootStatus::two_roots,
                   "missing zero-energy roots below lambda_substar");
        }
        const Real lambda_mid = 0.5 * (est.lambda_substar + est.lambda_star);
        const FiberMap fm(with_lambda(spec, lambda_mid), est.argmin_e);
        expect(extremal_level_e(spec, est.argmin_e) < lambda_mid,
               "witness does not sit below the midpoint level");
        expect(fm.zero_energy_roots(lambda_mid).status == RootStatus::no_root,
               "zero-energy equation unexpectedly solvable past the witness level");
        return "two_roots below lambda_substar; no_root witness in the gap";
    });

    suite.run("fiber.aii_identity", [&] {
        Rng rng(Rng::derive(seed, 9));
        Real worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const FiberMap fm(spec_fiber, u);
            const Real te = fm.find_t_e();
            for (int j = 0; j < 10; ++j) {
                const Real t = te * rng.log_uniform(0.2, 5.0);
                const Real lhs = fm.q_n(t) - fm.q_e(t);
                const Real h = 1e-6 * t;
                const Real rhs = (t / spec.q) *
                                 (fm.q_e(t + h) - fm.q_e(t - h)) / (2.0 * h);
                const Real scale = std::abs(fm.q_n(t)) + std::abs(fm.q_e(t)) + 1e-30;
                worst = std::max(worst, std::abs(lhs - rhs) / scale);
            }
        }
        expect(worst <= 1e-6, "identity residual " + num(worst));
        return "worst relative residual " + num(worst) + " over 50x10 samples";
    });

    suite.run("fiber.orderings", [&] {
        Rng rng(Rng::derive(seed, 10));
        for (int k = 0; k < 100; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const FiberReport report = fiber_report(spec_fiber, u, lambda_fiber);
            expect(report.t_n < report.t_e, "t_n !< t_e");
            expect(report.lambda_e < report.lambda_n, "Lambda_e !< Lambda_n");
            expect(report.roots_n.status == RootStatus::two_roots &&
                       report.roots_e.status == RootStatus::two_roots,
                   "expected two roots in both families");
            expect(report.roots_n.t_plus < report.t_n &&
                       report.t_n < report.roots_n.t_minus,
                   "Nehari roots do not bracket t_n");
            expect(report.t_e < report.roots_n.t_minus,
                   "t_e !< t^{n,-}");
            expect(report.roots_n.t_minus < report.roots_e.t_minus,
                   "t^{n,-} !< t^{e,-}");
            expect(report.roots_e.t_plus < report.roots_n.t_minus,
                   "t^{e,+} !< t^{n,-}");
        }
        return "root interleaving holds on 100 random fields";
    });

    suite.run("fiber.sign_dictionary", [&] {
        Rng rng(Rng::derive(seed, 11));
        for (int k = 0; k < 25; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const FiberMap fm(spec_fiber, u);
            const Real tn = fm.find_t_n();
            for (int j = 0; j < 8; ++j) {
                const Real t = tn * rng.log_uniform(0.1, 10.0);
                const Real qn_gap = fm.q_n(t) - lambda_fiber;
                const Real pairing = fm.pairing_along_ray(t);
                if (std::abs(qn_gap) > 1e-9 * (1.0 + lambda_fiber))
                    expect(qn_gap * pairing > 0.0, "q_n sign dictionary broken");
                const Real qe_gap = fm.q_e(t) - lambda_fiber;
                const Real j_val = fm.energy_along_ray(t);
                if (std::abs(qe_gap) > 1e-9 * (1.0 + lambda_fiber))
                    expect(qe_gap * j_val > 0.0, "q_e sign dictionary broken");
            }
        }
        return "sign(q_n - lambda) = sign(J' u) and sign(q_e - lambda) = sign(J)";
    });

    suite.run("fiber.derivative_bridge", [&] {
        Rng rng(Rng::derive(seed, 12));
        for (int k = 0; k < 20; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const FiberMap fm(spec_fiber, u);
            const RootPair roots = fm.nehari_roots(lambda_fiber);
            expect(roots.status == RootStatus::two_roots, "expected two roots");
            for (const Real root : {roots.t_plus, roots.t_minus}) {
                const Real h = 1e-6 * root;
                const Real slope = (fm.q_n(root + h) - fm.q_n(root - h)) / (2.0 * h);
                const Real j2 = fm.second_diag_along_ray(root);
                expect(slope * j2 > 0.0,
                       "sign(q_n') != sign(J'') at a Nehari root");
            }
        }
        return "sign(q_n') matches sign(J'') at both roots, 20 fields";
    });

    suite.run("fiber.extremal_homogeneity", [&] {
        Rng rng(Rng::derive(seed, 13));
        Real worst = 0.0;
        for (int k = 0; k < 30; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const Real base_n = extremal_level_n(spec, u);
            const Real base_e = extremal_level_e(spec, u);
            for (const Real alpha : {0.1, 3.0, 10.0}) {
                const Field scaled = alpha * u;
                worst = std::max(worst, std::abs(extremal_level_n(spec, scaled) - base_n) /
                                            std::abs(base_n));
                worst = std::max(worst, std::abs(extremal_level_e(spec, scaled) - base_e) /
                                            std::abs(base_e));
            }
        }
        expect(worst <= 1e-9, "homogeneity violation " + num(worst));
        return "Lambda_n, Lambda_e scale-invariant to " + num(worst);
    });

    suite.run("fiber.projected_norm_lower_bound", [&] {
        Rng rng(Rng::derive(seed, 14));
        Real min_norm = std::numeric_limits<Real>::infinity();
        for (int k = 0; k < 100; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const FiberMap fm(spec_fiber, u);
            const Real tn = fm.find_t_n();
            min_norm = std::min(min_norm, tn * std::sqrt(fm.norm_v_sq()));
        }
        expect(min_norm >= 1e-3,
               "projected norm dips to " + num(min_norm));
        return "min |t_n(u) u|_V = " + num(min_norm) + " over 100 fields";
    });

    suite.run("fiber.nehari_second_derivative_form", [&] {
        Rng rng(Rng::derive(seed, 15));
        for (int k = 0; k < 20; ++k) {
            const Field u = random_smooth_field(grid, rng);
            const FiberMap fm(spec_fiber, u);
            const RootPair roots = fm.nehari_roots(lambda_fiber);
            for (const Real root : {roots.t_plus, roots.t_minus}) {
                const Field v = root * u;
                const FunctionalValue fv = evaluate(spec_fiber, v);
                const Real direct = second_derivative_diag(spec_fiber, v);
                const Real nehari_form = 2.0 * fv.norm_v_sq -
                                         lambda_fiber * spec.q * fv.norm_qa_q -
                                         fv.nl_second - fv.nl_pairing;
                expect(std::abs(direct - nehari_form) <=
                           1e-8 * (std::abs(direct) + std::abs(nehari_form) + 1e-30),
                       "Nehari form of J'' disagrees on the manifold");
            }
        }
        return "J'' equals its Nehari form at projected points, 20 fields";
    });

    suite.run("energy.coercivity_smoke", [&] {
        const Field bump = gaussian_bump(grid, {0.0, 0.0}, grid.half_length / 6.0, 1.0);
        const Real base = std::numbers::pi / grid.half_length;
        std::vector<std::pair<Real, Real>> points; // (|v|_V, J(v))
        for (const int mode : {4, 8, 16, 32, 64}) {
            if (mode >= grid.points_per_axis / 2)
                break;
            const Field shape = (base * mode * grid.coordinate(0)).cos() + 0.25 * bump;
            const FiberMap fm(spec_fiber, shape);
            const RootPair roots = fm.nehari_roots(lambda_fiber);
            expect(roots.status == RootStatus::two_roots, "projection lost");
            points.emplace_back(roots.t_minus * std::sqrt(fm.norm_v_sq()),
                                fm.energy_along_ray(roots.t_minus));
        }
        std::sort(points.begin(), points.end());
        expect(points.back().first >= 10.0 * points.front().first,
               "sampled Nehari norms span less than x10");
        for (std::size_t i = 1; i < points.size(); ++i)
            expect(points[i].second > points[i - 1].second,
                   "J not increasing along the growing-norm Nehari sequence");
        return "J increases along a x" +
               num(points.back().first / points.front().first) +
               " Nehari norm sweep";
    });

    // --- one ground/bound solve pair ---

    const Real lambda_solve =
        config.lambda ? *config.lambda
                      : config.lambda_fraction.value_or(0.5) * est.lambda_star;
    const ProblemSpec spec_solve = with_lambda(spec, lambda_solve);
    SolveOptions options;
    options.max_iter = config.solve_max_iter;
    options.tol = config.solve_tol;
    options.lambda_star_est = est.lambda_star;

    SolveResult ground, bound;
    suite.run("solver.ground_state", [&] {
        ground = solve_ground(spec_solve, config.solve_starts, seed, options,
                              {est.argmin_n});
        expect(ground.converged, "ground solve did not converge (residual " +
                                     num(ground.residual) + ")");
        expect(ground.j < 0.0, "ground energy not negative");
        expect(ground.j2_diag > 0.0, "ground J'' not positive");
        const Real u_norm = std::sqrt(v_norm_sq(grid, spec.potential, ground.u));
        expect(ground.residual <= 1e-6 * (1.0 + u_norm), "residual above threshold");
        expect(ground.max_pairing_ratio <= 1e-8, "iterates left the Nehari set");
        expect(ground.min_j2_ratio > 1e-10, "iterate touched the degenerate set");
        expect(ground.monotone, "descent not monotone");
        return "J = " + num(ground.j) + ", J'' = " + num(ground.j2_diag) +
               ", residual = " + num(ground.residual);
    });

    suite.run("solver.bound_state", [&] {
        bound = solve_bound(spec_solve, config.solve_starts, seed, options);
        expect(bound.converged, "bound solve did not converge (residual " +
                                    num(bound.residual) + ")");
        expect(bound.j2_diag < 0.0, "bound J'' not negative");
        expect(bound.max_pairing_ratio <= 1e-8, "iterates left the Nehari set");
        expect(bound.monotone, "descent not monotone");
        return "J = " + num(bound.j) + ", J'' = " + num(bound.j2_diag) +
               ", residual = " + num(bound.residual);
    });

    if (suite.results[suite.results.size() - 2].pass &&
        suite.results.back().pass) {
        suite.run("solver.two_distinct_solutions", [&] {
            const Real dist = std::sqrt(
                v_norm_sq(grid, spec.potential, ground.u - bound.u));
            expect(dist > 1e-3, "solutions coincide (distance " + num(dist) + ")");
            expect(ground.j < bound.j, "ground level not below bound level");
            return "|u - v|_V = " + num(dist) + ", J_ground < J_bound";
        });

        suite.run("solver.stationarity", [&] {
            Rng rng(Rng::derive(seed, 16));
            for (const SolveResult* result : {&ground, &bound}) {
                const Real u_norm =
                    std::sqrt(v_norm_sq(grid, spec.potential, result->u));
                for (int k = 0; k < 5; ++k) {
                    Field phi = random_smooth_field(grid, rng);
                    phi /= l2_norm(grid, phi);
                    const Real eps = 1e-5 * (1.0 + u_norm);
                    const Real fd =
                        fd_energy_derivative(spec_solve, result->u, phi, eps);
                    expect(std::abs(fd) <= 1e-4 * (1.0 + u_norm),
                           "directional derivative " + num(fd) + " too large");
                }
            }
            return "5 random directional derivatives vanish at both solutions";
        });
    }

    suite.run("solver.refusal_past_lambda_star", [&] {
        bool refused = false;
        try {
            solve_branch(with_lambda(spec, 1.01 * est.lambda_star),
                         Branch::n_plus,
                         gaussian_bump(grid, {0.0, 0.0}, 1.0, 1.0), options);
        } catch (const SolveError&) {
            refused = true;
        }
        expect(refused, "solve at lambda > lambda_star was not refused");
        return "solve refused at 1.01 lambda_star";
    });

    return suite.results;
}

} // namespace nrq
