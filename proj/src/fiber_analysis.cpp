#include "nrq/fiber_analysis.hpp"

#include <cmath>
#include <fstream>

namespace nrq {

const char* to_string(RootStatus status) {
    switch (status) {
    case RootStatus::two_roots: return "two_roots";
    case RootStatus::tangent: return "tangent";
    case RootStatus::no_root: return "no_root";
    }
    return "?";
}

FiberMap::FiberMap(const ProblemSpec& spec, Field u) : spec_(&spec), u_(std::move(u)) {
    if (u_.size() != spec.grid.size())
        throw DomainError("fiber field does not live on the problem grid");
    if (!u_.isFinite().all())
        throw DomainError("fiber field has non-finite entries");
    weight_ = spec.grid.cell_volume();
    norm_v_sq_ = v_norm_sq(spec.grid, spec.potential, u_);
    Real qa = 0.0;
    for (Eigen::Index i = 0; i < u_.size(); ++i)
        qa += spec.weight_a(i) * detail::pow_abs(std::abs(u_(i)), spec.q);
    qa_norm_q_ = weight_ * qa;
    bu_ = spec.weight_b * u_;
    bu2_ = bu_ * u_;
    if (spec.nl.kind == Nonlinearity::Kind::PowerSum) {
        power_moments_.resize(spec.nl.powers.size());
        for (std::size_t k = 0; k < spec.nl.powers.size(); ++k) {
            const Real p = spec.nl.powers[k];
            Real acc = 0.0;
            for (Eigen::Index i = 0; i < u_.size(); ++i)
                acc += spec.weight_b(i) * detail::pow_abs(std::abs(u_(i)), p);
            power_moments_[k] = weight_ * acc;
        }
    }
    if (!(u_.abs().maxCoeff() > 0.0))
        throw DomainError("fiber analysis needs a nonzero field");
    if (!(qa_norm_q_ > 0.0))
        throw DomainError(
            "the a-weighted norm of the field vanishes (a * u = 0); the "
            "Rayleigh quotients are undefined along this ray");
    if (!(norm_v_sq_ > 0.0))
        throw DomainError("the V-norm of the field is not positive; the "
                          "discrete quadratic form fails (V2) along this ray");
}

Real FiberMap::pairing_integral(Real t) const {
    const Nonlinearity& nl = spec_->nl;
    if (nl.kind == Nonlinearity::Kind::PowerSum) {
        Real acc = 0.0;
        for (std::size_t k = 0; k < nl.powers.size(); ++k)
            acc += detail::pow_abs(t, nl.powers[k] - 1.0) * power_moments_[k];
        return acc;
    }
    Real acc = 0.0;
    for (Eigen::Index i = 0; i < u_.size(); ++i)
        acc += bu_(i) * nl.f(t * u_(i));
    return weight_ * acc;
}

Real FiberMap::energy_integral(Real t) const {
    const Nonlinearity& nl = spec_->nl;
    if (nl.kind == Nonlinearity::Kind::PowerSum) {
        Real acc = 0.0;
        for (std::size_t k = 0; k < nl.powers.size(); ++k)
            acc += detail::pow_abs(t, nl.powers[k]) / nl.powers[k] *
                   power_moments_[k];
        return acc;
    }
    Real acc = 0.0;
    for (Eigen::Index i = 0; i < u_.size(); ++i)
        acc += spec_->weight_b(i) * nl.antiderivative(t * u_(i));
    return weight_ * acc;
}

Real FiberMap::second_integral(Real t) const {
    const Nonlinearity& nl = spec_->nl;
    if (nl.kind == Nonlinearity::Kind::PowerSum) {
        Real acc = 0.0;
        for (std::size_t k = 0; k < nl.powers.size(); ++k)
            acc += (nl.powers[k] - 1.0) *
                   detail::pow_abs(t, nl.powers[k] - 2.0) * power_moments_[k];
        return acc;
    }
    Real acc = 0.0;
    for (Eigen::Index i = 0; i < u_.size(); ++i)
        acc += bu2_(i) * nl.fprime(t * u_(i));
    return weight_ * acc;
}

Real FiberMap::h_integral(Real t) const {
    const Nonlinearity& nl = spec_->nl;
    const Real q = spec_->q;
    if (nl.kind == Nonlinearity::Kind::PowerSum) {
        Real acc = 0.0;
        for (std::size_t k = 0; k < nl.powers.size(); ++k)
            acc += (nl.powers[k] - q) *
                   detail::pow_abs(t, nl.powers[k] - 2.0) * power_moments_[k];
        return acc;
    }
    if (nl.kind == Nonlinearity::Kind::LogPower) {
        // H(tau) = (2-q) ln(1+|tau|) + |tau|/(1+|tau|), fused single pass
        Real acc = 0.0;
        for (Eigen::Index i = 0; i < u_.size(); ++i) {
            const Real a = std::abs(t * u_(i));
            acc += bu2_(i) * ((2.0 - q) * std::log1p(a) + a / (1.0 + a));
        }
        return weight_ * acc;
    }
    Real acc = 0.0;
    for (Eigen::Index i = 0; i < u_.size(); ++i) {
        const Real ti = t * u_(i);
        if (ti == 0.0)
            continue;
        acc += bu2_(i) * (nl.fprime(ti) + (1.0 - q) * nl.f(ti) / ti);
    }
    return weight_ * acc;
}

Real FiberMap::g_integral(Real t) const {
    const Nonlinearity& nl = spec_->nl;
    const Real q = spec_->q;
    if (nl.kind == Nonlinearity::Kind::PowerSum) {
        Real acc = 0.0;
        for (std::size_t k = 0; k < nl.powers.size(); ++k)
            acc += (1.0 - q / nl.powers[k]) *
                   detail::pow_abs(t, nl.powers[k] - 2.0) * power_moments_[k];
        return acc;
    }
    if (nl.kind == Nonlinearity::Kind::LogPower) {
        // G(tau) = (1 - q/2) ln(1+a) + (q/2)(ln(1+a) - a)/a^2 + q/4 with
        // a = |tau|; the middle quotient switches to its series for small a
        // to avoid cancellation.
        Real acc = 0.0;
        for (Eigen::Index i = 0; i < u_.size(); ++i) {
            const Real a = std::abs(t * u_(i));
            if (a == 0.0)
                continue;
            const Real l = std::log1p(a);
            Real quotient; // (ln(1+a) - a)/a^2, in (-1/2, 0)
            if (a < 1e-4)
                quotient = -0.5 + a / 3.0 - 0.25 * a * a + 0.2 * a * a * a;
            else
                quotient = (l - a) / (a * a);
            acc += bu2_(i) *
                   ((1.0 - 0.5 * q) * l + 0.5 * q * quotient + 0.25 * q);
        }
        return weight_ * acc;
    }
    Real acc = 0.0;
    for (Eigen::Index i = 0; i < u_.size(); ++i) {
        const Real ti = t * u_(i);
        if (ti == 0.0)
            continue;
        acc += bu2_(i) * (nl.f(ti) / ti - q * nl.antiderivative(ti) / (ti * ti));
    }
    return weight_ * acc;
}

Real FiberMap::q_n(Real t) const {
    const Real q = spec_->q;
    return (std::pow(t, 2.0 - q) * norm_v_sq_ -
            std::pow(t, 1.0 - q) * pairing_integral(t)) /
           qa_norm_q_;
}

Real FiberMap::q_e(Real t) const {
    const Real q = spec_->q;
    return q *
           (0.5 * std::pow(t, 2.0 - q) * norm_v_sq_ -
            std::pow(t, -q) * energy_integral(t)) /
           qa_norm_q_;
}

Real FiberMap::energy_along_ray(Real t) const {
    const Real q = spec_->q;
    return 0.5 * t * t * norm_v_sq_ -
           (spec_->lambda / q) * std::pow(t, q) * qa_norm_q_ -
           energy_integral(t);
}

Real FiberMap::second_diag_along_ray(Real t) const {
    const Real q = spec_->q;
    return t * t * norm_v_sq_ -
           spec_->lambda * (q - 1.0) * std::pow(t, q) * qa_norm_q_ -
           t * t * second_integral(t);
}

Real FiberMap::pairing_along_ray(Real t) const {
    return t * t * norm_v_sq_ - spec_->lambda * std::pow(t, spec_->q) * qa_norm_q_ -
           t * pairing_integral(t);
}

// Solve integral(t) = target for the unique root of a map that increases in t
// (H/G composed with tu is monotone along the ray). Bracket by doubling or
// halving from t = 1, at most 60 steps either way.
Real FiberMap::solve_monotone(Real target,
                              Real (FiberMap::*integral)(Real) const,
                              Real rel_tol, const char* label) const {
    Real lo = 1.0, hi = 1.0;
    Real value = (this->*integral)(1.0);
    if (value < target) {
        int steps = 0;
        while (value < target) {
            if (++steps > 60)
                throw BracketError(std::string(label) +
                                       ": no upper bracket after 60 doublings "
                                       "(monotonicity hypotheses violated "
                                       "numerically?)",
                                   lo, hi);
            lo = hi;
            hi *= 2.0;
            value = (this->*integral)(hi);
        }
    } else {
        int steps = 0;
        while (value > target) {
            if (++steps > 60)
                throw BracketError(std::string(label) +
                                       ": no lower bracket after 60 halvings",
                                   lo, hi);
            hi = lo;
            lo *= 0.5;
            value = (this->*integral)(lo);
        }
    }
    while (hi - lo > rel_tol * hi) {
        const Real mid = 0.5 * (lo + hi);
        if ((this->*integral)(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Real FiberMap::find_t_n(Real rel_tol) const {
    const Real target = (2.0 - spec_->q) * norm_v_sq_;
    return solve_monotone(target, &FiberMap::h_integral, rel_tol, "find_t_n");
}

Real FiberMap::find_t_e(Real rel_tol) const {
    const Real target = 0.5 * (2.0 - spec_->q) * norm_v_sq_;
    return solve_monotone(target, &FiberMap::g_integral, rel_tol, "find_t_e");
}

// Two-sided root solve of map(t) = lambda around the fiber maximum: the map
// rises from 0 on (0, t_max_point) and falls to -inf beyond it.
RootPair FiberMap::roots_of(Real lambda, Real t_max_point, Real peak,
                            Real (FiberMap::*map)(Real) const, Real rel_tol,
                            const char* label) const {
    RootPair roots;
    if (std::abs(peak - lambda) <= 1e-9 * std::max(1.0, lambda)) {
        roots.status = RootStatus::tangent;
        roots.t_plus = roots.t_minus = t_max_point;
        return roots;
    }
    if (peak < lambda) {
        roots.status = RootStatus::no_root;
        return roots;
    }
    roots.status = RootStatus::two_roots;

    // left root: the map increases through lambda on (0, t_max_point)
    {
        Real hi = t_max_point;
        Real lo = t_max_point;
        int steps = 0;
        do {
            if (++steps > 400)
                throw BracketError(std::string(label) +
                                       ": left bracket did not close",
                                   lo, hi);
            hi = lo;
            lo *= 0.5;
        } while (!((this->*map)(lo) < lambda));
        while (hi - lo > rel_tol * hi) {
            const Real mid = 0.5 * (lo + hi);
            if ((this->*map)(mid) < lambda)
                lo = mid;
            else
                hi = mid;
        }
        roots.t_plus = 0.5 * (lo + hi);
    }
    // right root: the map decreases through lambda beyond the maximizer
    {
        Real lo = t_max_point;
        Real hi = t_max_point;
        int steps = 0;
        do {
            if (++steps > 60)
                throw BracketError(std::string(label) +
                                       ": right bracket did not close after "
                                       "60 doublings",
                                   lo, hi);
            lo = hi;
            hi *= 2.0;
        } while (!((this->*map)(hi) < lambda));
        while (hi - lo > rel_tol * hi) {
            const Real mid = 0.5 * (lo + hi);
            if ((this->*map)(mid) < lambda)
                hi = mid;
            else
                lo = mid;
        }
        roots.t_minus = 0.5 * (lo + hi);
    }
    return roots;
}

RootPair FiberMap::nehari_roots(Real lambda, Real rel_tol) const {
    if (!(lambda > 0.0))
        throw DomainError("lambda must be positive");
    const Real tn = find_t_n(rel_tol);
    return roots_of(lambda, tn, q_n(tn), &FiberMap::q_n, rel_tol,
                    "nehari_roots");
}

RootPair FiberMap::zero_energy_roots(Real lambda, Real rel_tol) const {
    if (!(lambda > 0.0))
        throw DomainError("lambda must be positive");
    const Real te = find_t_e(rel_tol);
    return roots_of(lambda, te, q_e(te), &FiberMap::q_e, rel_tol,
                    "zero_energy_roots");
}

Real rayleigh_n(const ProblemSpec& spec, const Field& u) {
    return FiberMap(spec, u).q_n(1.0);
}

Real rayleigh_e(const ProblemSpec& spec, const Field& u) {
    return FiberMap(spec, u).q_e(1.0);
}

Real find_t_n(const ProblemSpec& spec, const Field& u) {
    return FiberMap(spec, u).find_t_n();
}

Real find_t_e(const ProblemSpec& spec, const Field& u) {
    return FiberMap(spec, u).find_t_e();
}

RootPair nehari_roots(const ProblemSpec& spec, const Field& u, Real lambda) {
    return FiberMap(spec, u).nehari_roots(lambda);
}

RootPair zero_energy_roots(const ProblemSpec& spec, const Field& u, Real lambda) {
    return FiberMap(spec, u).zero_energy_roots(lambda);
}

FiberReport fiber_report(const ProblemSpec& spec, const Field& u, Real lambda) {
    const FiberMap fm(spec, u);
    FiberReport report;
    report.t_n = fm.find_t_n();
    report.lambda_n = fm.q_n(report.t_n);
    report.t_e = fm.find_t_e();
    report.lambda_e = fm.q_e(report.t_e);
    report.roots_n = fm.nehari_roots(lambda);
    report.roots_e = fm.zero_energy_roots(lambda);

    if (!(report.t_n < report.t_e))
        throw Error("fiber report violates t_n < t_e");
    if (!(report.lambda_e < report.lambda_n))
        throw Error("fiber report violates lambda_e < lambda_n");
    if (report.roots_n.status == RootStatus::two_roots &&
        !(0.0 < report.roots_n.t_plus && report.roots_n.t_plus < report.t_n &&
          report.t_n < report.roots_n.t_minus))
        throw Error("fiber report violates the Nehari root interleaving");
    if (report.roots_e.status == RootStatus::two_roots &&
        !(0.0 < report.roots_e.t_plus && report.roots_e.t_plus < report.t_e &&
          report.t_e < report.roots_e.t_minus))
        throw Error("fiber report violates the zero-energy root interleaving");
    return report;
}

std::vector<FiberSample> sample_fiber(const ProblemSpec& spec, const Field& u,
                                      Real t_min, Real t_max, int count) {
    if (!(0.0 < t_min && t_min < t_max))
        throw DomainError("sample_fiber needs 0 < t_min < t_max");
    if (count < 2)
        throw DomainError("sample_fiber needs count >= 2");
    const FiberMap fm(spec, u);
    std::vector<FiberSample> rows(count);
    const Real log_lo = std::log(t_min);
    const Real log_hi = std::log(t_max);
    for (int i = 0; i < count; ++i) {
        const Real t = std::exp(log_lo + (log_hi - log_lo) * i / (count - 1));
        rows[i] = {t, fm.q_n(t), fm.q_e(t), fm.energy_along_ray(t)};
    }
    return rows;
}

void write_fiber_csv(const std::filesystem::path& path,
                     const std::vector<FiberSample>& rows) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << "t,q_n,q_e,J\n";
    char buffer[160];
    for (const auto& row : rows) {
        std::snprintf(buffer, sizeof buffer, "%.17g,%.17g,%.17g,%.17g\n", row.t,
                      row.q_n, row.q_e, row.j);
        out << buffer;
    }
    if (!out)
        throw Error("write to " + path.string() + " failed");
}

} // namespace nrq
