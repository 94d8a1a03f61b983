#include "nrq/fields.hpp"

#include <cmath>
#include <numbers>

namespace nrq {

Field constant_field(const Grid& grid, Real value) {
    return Field::Constant(grid.size(), value);
}

Field gaussian_bump(const Grid& grid, const std::array<Real, 2>& center,
                    Real width, Real amplitude) {
    if (!(width > 0.0))
        throw DomainError("bump width must be positive");
    Field r_sq = Field::Zero(grid.size());
    for (int axis = 0; axis < grid.dim; ++axis) {
        const Field d = grid.coordinate(axis) - center[axis];
        r_sq += d * d;
    }
    return amplitude * (-r_sq / (2.0 * width * width)).exp();
}

Field signed_bump(const Grid& grid, const std::array<Real, 2>& center,
                  Real width, Real amplitude) {
    const Field bump = gaussian_bump(grid, center, width, amplitude);
    const Field d = grid.coordinate(0) - center[0];
    return (d / width) * bump;
}

Field random_bump_field(const Grid& grid, Rng& rng) {
    const Real box = grid.half_length;
    std::array<Real, 2> center = {rng.uniform(-0.4 * box, 0.4 * box),
                                  grid.dim > 1 ? rng.uniform(-0.4 * box, 0.4 * box)
                                               : 0.0};
    const Real width = rng.log_uniform(box / 12.0, box / 3.0);
    return gaussian_bump(grid, center, width, 1.0);
}

Field random_smooth_field(const Grid& grid, Rng& rng) {
    Field u = Field::Zero(grid.size());
    const int bumps = 1 + static_cast<int>(rng.uniform() * 3.0);
    for (int b = 0; b < bumps; ++b) {
        Field bump = random_bump_field(grid, rng);
        u += rng.uniform(-1.0, 1.0) * bump;
    }
    const Real base = std::numbers::pi / grid.half_length;
    const int mode_cap = std::min(6, grid.points_per_axis / 4);
    for (int axis = 0; axis < grid.dim; ++axis) {
        const Field x = grid.coordinate(axis);
        for (int m = 1; m <= mode_cap; ++m) {
            const Real decay = 1.0 / ((1.0 + m) * (1.0 + m));
            u += (rng.normal() * decay) * (base * m * x).cos();
            u += (rng.normal() * decay) * (base * m * x).sin();
        }
    }
    const Real peak = u.abs().maxCoeff();
    if (!(peak > 0.0))
        return constant_field(grid, 1.0);
    return u / peak;
}

} // namespace nrq
