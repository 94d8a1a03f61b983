#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "nrq/errors.hpp"
#include "nrq/types.hpp"

namespace nrq {

namespace detail {

// |a|^e with a fast path for the half-integer exponents the bundled kinds and
// the sublinear term use (q, q-1, p_i - 2, ...).
inline Real pow_abs(Real a, Real e) {
    const Real doubled = 2.0 * e;
    const int half_steps = static_cast<int>(doubled);
    if (doubled == half_steps && half_steps >= 0 && half_steps <= 16) {
        const Real root = (half_steps & 1) ? std::sqrt(a) : 1.0;
        Real base = a;
        Real acc = 1.0;
        int n = half_steps >> 1;
        while (n) {
            if (n & 1)
                acc *= base;
            base *= base;
            n >>= 1;
        }
        return acc * root;
    }
    return std::pow(a, e);
}

} // namespace detail

// The superlinear term f of the right-hand side, with its derivative and
// antiderivative F(t) = integral of f from 0 to t. Built-in kinds are odd in
// t, vanish at 0 faster than linearly and grow superlinearly at infinity.
//
// PowerSum: f(t) = sum_i |t|^{p_i - 2} t with exponents p_i > 2.
// LogPower: f(t) = t ln(1 + |t|). Its antiderivative is derived directly:
//           F(t) = (t^2/2) ln(1+|t|) - t^2/4 + |t|/2 - ln(1+|t|)/2,
//           which indeed satisfies F' = f and F(0) = 0.
// Custom:   user closures; F falls back to adaptive quadrature of f when no
//           analytic antiderivative is supplied.
struct Nonlinearity {
    enum class Kind { PowerSum, LogPower, Custom };

    Kind kind = Kind::PowerSum;
    std::vector<Real> powers; // PowerSum exponents, ascending, all > 2
    std::function<Real(Real)> custom_f;
    std::function<Real(Real)> custom_fprime;
    std::function<Real(Real)> custom_antiderivative; // optional

    static Nonlinearity power_sum(std::vector<Real> exponents);
    static Nonlinearity log_power();
    static Nonlinearity custom(std::function<Real(Real)> f,
                               std::function<Real(Real)> fprime,
                               std::function<Real(Real)> antiderivative = {});

    std::string describe() const;

    bool has_analytic_antiderivative() const {
        return kind != Kind::Custom || static_cast<bool>(custom_antiderivative);
    }

    Real f(Real t) const {
        switch (kind) {
        case Kind::PowerSum: {
            Real acc = 0.0;
            const Real a = std::abs(t);
            for (Real p : powers)
                acc += detail::pow_abs(a, p - 2.0) * t;
            return acc;
        }
        case Kind::LogPower:
            return t * std::log1p(std::abs(t));
        case Kind::Custom:
            return custom_f(t);
        }
        return 0.0;
    }

    Real fprime(Real t) const {
        switch (kind) {
        case Kind::PowerSum: {
            Real acc = 0.0;
            const Real a = std::abs(t);
            for (Real p : powers)
                acc += (p - 1.0) * detail::pow_abs(a, p - 2.0);
            return acc;
        }
        case Kind::LogPower: {
            const Real a = std::abs(t);
            return std::log1p(a) + a / (1.0 + a);
        }
        case Kind::Custom:
            return custom_fprime(t);
        }
        return 0.0;
    }

    Real antiderivative(Real t) const;
};

// Validated pointwise evaluation (rejects non-finite t).
Real eval_f(const Nonlinearity& nl, Real t);
Real eval_fprime(const Nonlinearity& nl, Real t);
Real eval_F(const Nonlinearity& nl, Real t);

// G(t) = f(t)/t - q F(t)/t^2, continued by 0 at t = 0.
Real eval_G(const Nonlinearity& nl, Real q, Real t);

// H(t) = f'(t) + (1-q) f(t)/t, continued by 0 at t = 0.
Real eval_H(const Nonlinearity& nl, Real q, Real t);

// Brute-force antiderivative oracle: adaptive quadrature of f on [0, t].
Real integrate_f_numeric(const Nonlinearity& nl, Real t, Real tol = 1e-12);

} // namespace nrq
