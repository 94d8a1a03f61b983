#pragma once

#include <filesystem>

#include "nrq/errors.hpp"
#include "nrq/types.hpp"

namespace nrq {

// Periodic box [-L, L)^d sampled on a uniform lattice of n points per axis,
// together with the Fourier multipliers |xi_k|^{2s} of the spectral fractional
// Laplacian. The discrete frequencies are xi_k = pi*k/L with k the standard
// DFT index set {0, 1, ..., n/2, -(n/2-1), ..., -1}.
struct Grid {
    int dim = 1;            // 1 or 2
    int points_per_axis = 0; // n, power of two >= 8
    Real half_length = 0.0; // L
    Real spacing = 0.0;     // h = 2L/n
    Real s = 0.0;           // fractional order
    Field multipliers;      // |xi|^{2s} per mode, size n^dim; zero mode exactly 0

    Eigen::Index size() const { return multipliers.size(); }

    // Quadrature weight of one cell, h^dim.
    Real cell_volume() const;

    // Coordinate of every grid point along the given axis, row-major.
    Field coordinate(int axis) const;
};

Grid build_grid(int dim, int points_per_axis, Real half_length, Real s,
                bool allow_any_s = false);

// Spectral (-Laplacian)^s: forward transform, multiply by |xi|^{2s}, inverse
// transform; the (tiny) imaginary residue is discarded.
Field apply_fractional_laplacian(const Grid& grid, const Field& u);

// Rectangle rule, h^d * sum. Spectrally accurate for smooth periodic data.
Real integrate(const Grid& grid, const Field& g);

// (u, v)_V = integral of u * (-Lap)^s v + integral of V u v.
Real inner_product_v(const Grid& grid, const Field& potential, const Field& u,
                     const Field& v);

Real v_norm_sq(const Grid& grid, const Field& potential, const Field& u);

// L2 norm under the grid quadrature.
Real l2_norm(const Grid& grid, const Field& u);

// CSV serialization: one value per line, row-major, 17 significant digits.
void write_field_csv(const std::filesystem::path& path, const Field& field);
Field read_field_csv(const std::filesystem::path& path,
                     Eigen::Index expected_size);

} // namespace nrq
