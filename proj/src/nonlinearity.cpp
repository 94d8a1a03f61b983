#include "nrq/nonlinearity.hpp"

#include <algorithm>
#include <sstream>

#include "nrq/numerics.hpp"

namespace nrq {

Nonlinearity Nonlinearity::power_sum(std::vector<Real> exponents) {
    if (exponents.empty())
        throw DomainError("power_sum needs at least one exponent");
    std::sort(exponents.begin(), exponents.end());
    for (Real p : exponents)
        if (!(p > 2.0) || !std::isfinite(p))
            throw DomainError("power_sum exponents must be finite and > 2");
    Nonlinearity nl;
    nl.kind = Kind::PowerSum;
    nl.powers = std::move(exponents);
    return nl;
}

Nonlinearity Nonlinearity::log_power() {
    Nonlinearity nl;
    nl.kind = Kind::LogPower;
    return nl;
}

Nonlinearity Nonlinearity::custom(std::function<Real(Real)> f,
                                  std::function<Real(Real)> fprime,
                                  std::function<Real(Real)> antiderivative) {
    if (!f || !fprime)
        throw DomainError("custom nonlinearity needs f and f'");
    Nonlinearity nl;
    nl.kind = Kind::Custom;
    nl.custom_f = std::move(f);
    nl.custom_fprime = std::move(fprime);
    nl.custom_antiderivative = std::move(antiderivative);
    return nl;
}

std::string Nonlinearity::describe() const {
    switch (kind) {
    case Kind::PowerSum: {
        std::ostringstream out;
        out << "power_sum(";
        for (std::size_t i = 0; i < powers.size(); ++i)
            out << (i ? "," : "") << powers[i];
        out << ")";
        return out.str();
    }
    case Kind::LogPower:
        return "log_power";
    case Kind::Custom:
        return "custom";
    }
    return "?";
}

Real Nonlinearity::antiderivative(Real t) const {
    switch (kind) {
    case Kind::PowerSum: {
        Real acc = 0.0;
        const Real a = std::abs(t);
        for (Real p : powers)
            acc += detail::pow_abs(a, p) / p;
        return acc;
    }
    case Kind::LogPower: {
        const Real a = std::abs(t);
        const Real l = std::log1p(a);
        return 0.5 * a * a * l - 0.25 * a * a + 0.5 * a - 0.5 * l;
    }
    case Kind::Custom:
        if (custom_antiderivative)
            return custom_antiderivative(t);
        return integrate_f_numeric(*this, t);
    }
    return 0.0;
}

namespace {

void require_finite(Real t) {
    if (!std::isfinite(t))
        throw DomainError("nonlinearity evaluated at non-finite t");
}

} // namespace

Real eval_f(const Nonlinearity& nl, Real t) {
    require_finite(t);
    return nl.f(t);
}

Real eval_fprime(const Nonlinearity& nl, Real t) {
    require_finite(t);
    return nl.fprime(t);
}

Real eval_F(const Nonlinearity& nl, Real t) {
    require_finite(t);
    if (t == 0.0)
        return 0.0;
    return nl.antiderivative(t);
}

Real eval_G(const Nonlinearity& nl, Real q, Real t) {
    if (t == 0.0)
        return 0.0;
    require_finite(t);
    return nl.f(t) / t - q * nl.antiderivative(t) / (t * t);
}

Real eval_H(const Nonlinearity& nl, Real q, Real t) {
    if (t == 0.0)
        return 0.0;
    require_finite(t);
    return nl.fprime(t) + (1.0 - q) * nl.f(t) / t;
}

Real integrate_f_numeric(const Nonlinearity& nl, Real t, Real tol) {
    require_finite(t);
    if (t == 0.0)
        return 0.0;
    return adaptive_simpson([&nl](Real s) { return nl.f(s); }, 0.0, t, tol);
}

} // namespace nrq
