#pragma once

#include <array>

#include "nrq/rng.hpp"
#include "nrq/spectral_grid.hpp"

namespace nrq {

Field constant_field(const Grid& grid, Real value);

// exp(-|x - center|^2 / (2 width^2)) scaled by amplitude.
Field gaussian_bump(const Grid& grid, const std::array<Real, 2>& center,
                    Real width, Real amplitude);

// Sign-changing first-excited-mode shape: ((x0 - c0)/width) * gaussian bump.
Field signed_bump(const Grid& grid, const std::array<Real, 2>& center,
                  Real width, Real amplitude);

// Random probe: a few random Gaussian bumps plus a decaying random combination
// of low Fourier modes. Never identically zero.
Field random_smooth_field(const Grid& grid, Rng& rng);

// Random positive bump with random center/width (solver/extremal starts).
Field random_bump_field(const Grid& grid, Rng& rng);

} // namespace nrq
