#include "nrq/spectral_grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

namespace nrq {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::FFT<Real>& fft_engine() {
    thread_local Eigen::FFT<Real> fft;
    return fft;
}

// In-place DFT over every axis of a row-major n^dim array. The inverse
// transform carries the 1/n normalization per axis.
void transform_all_axes(ComplexField& data, int dim, int n, bool inverse) {
    auto& fft = fft_engine();
    Eigen::VectorXcd line(n), out(n);
    if (dim == 1) {
        line = data.matrix();
        if (inverse)
            fft.inv(out, line);
        else
            fft.fwd(out, line);
        data = out.array();
        return;
    }
    // axis 1 (contiguous rows)
    for (int row = 0; row < n; ++row) {
        line = data.segment(static_cast<Eigen::Index>(row) * n, n).matrix();
        if (inverse)
            fft.inv(out, line);
        else
            fft.fwd(out, line);
        data.segment(static_cast<Eigen::Index>(row) * n, n) = out.array();
    }
    // axis 0 (stride n)
    for (int col = 0; col < n; ++col) {
        for (int row = 0; row < n; ++row)
            line(row) = data(static_cast<Eigen::Index>(row) * n + col);
        if (inverse)
            fft.inv(out, line);
        else
            fft.fwd(out, line);
        for (int row = 0; row < n; ++row)
            data(static_cast<Eigen::Index>(row) * n + col) = out(row);
    }
}

int frequency_index(int i, int n) { return (i <= n / 2) ? i : i - n; }

} // namespace

Real Grid::cell_volume() const {
    return dim == 1 ? spacing : spacing * spacing;
}

Field Grid::coordinate(int axis) const {
    if (axis < 0 || axis >= dim)
        throw DomainError("grid axis " + std::to_string(axis) +
                          " out of range for dim " + std::to_string(dim));
    const int n = points_per_axis;
    Field x(size());
    for (Eigen::Index idx = 0; idx < size(); ++idx) {
        const int i = (dim == 1) ? static_cast<int>(idx)
                                 : (axis == 0 ? static_cast<int>(idx) / n
                                              : static_cast<int>(idx) % n);
        x(idx) = -half_length + spacing * i;
    }
    return x;
}

Grid build_grid(int dim, int points_per_axis, Real half_length, Real s,
                bool allow_any_s) {
    if (dim != 1 && dim != 2)
        throw DomainError("grid dimension must be 1 or 2, got " +
                          std::to_string(dim));
    if (!is_power_of_two(points_per_axis) || points_per_axis < 8)
        throw DomainError("points per axis must be a power of two >= 8, got " +
                          std::to_string(points_per_axis));
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw DomainError("box half-length must be positive and finite");
    if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError("fractional order s must be positive and finite");
    const Real s_cap = std::min(1.0, 0.5 * dim);
    if (!allow_any_s && !(s < s_cap))
        throw DomainError(
            "fractional order s = " + std::to_string(s) +
            " is outside (0, min{1, d/2}) = (0, " + std::to_string(s_cap) +
            "); pass --allow-any-s to accept it anyway");

    Grid grid;
    grid.dim = dim;
    grid.points_per_axis = points_per_axis;
    grid.half_length = half_length;
    grid.spacing = 2.0 * half_length / points_per_axis;
    grid.s = s;

    const int n = points_per_axis;
    const Real base_frequency = std::numbers::pi / half_length;
    const Eigen::Index total = (dim == 1) ? n : static_cast<Eigen::Index>(n) * n;
    grid.multipliers.resize(total);
    for (Eigen::Index idx = 0; idx < total; ++idx) {
        Real xi_sq = 0.0;
        if (dim == 1) {
            const Real xi = base_frequency * frequency_index(static_cast<int>(idx), n);
            xi_sq = xi * xi;
        } else {
            const int i0 = static_cast<int>(idx) / n;
            const int i1 = static_cast<int>(idx) % n;
            const Real xi0 = base_frequency * frequency_index(i0, n);
            const Real xi1 = base_frequency * frequency_index(i1, n);
            xi_sq = xi0 * xi0 + xi1 * xi1;
        }
        grid.multipliers(idx) = (xi_sq == 0.0) ? 0.0 : std::pow(xi_sq, s);
    }
    return grid;
}

namespace {

void require_on_grid(const Grid& grid, const Field& u, const char* what) {
    if (u.size() != grid.size())
        throw DomainError(std::string(what) + " has " + std::to_string(u.size()) +
                          " samples but the grid has " +
                          std::to_string(grid.size()));
}

} // namespace

Field apply_fractional_laplacian(const Grid& grid, const Field& u) {
    require_on_grid(grid, u, "field");
    ComplexField modes = u.cast<Complex>();
    transform_all_axes(modes, grid.dim, grid.points_per_axis, false);
    modes *= grid.multipliers.cast<Complex>();
    transform_all_axes(modes, grid.dim, grid.points_per_axis, true);
    return modes.real();
}

Real integrate(const Grid& grid, const Field& g) {
    require_on_grid(grid, g, "integrand");
    return grid.cell_volume() * g.sum();
}

Real inner_product_v(const Grid& grid, const Field& potential, const Field& u,
                     const Field& v) {
    require_on_grid(grid, potential, "potential");
    require_on_grid(grid, u, "field u");
    require_on_grid(grid, v, "field v");
    const Field frac_v = apply_fractional_laplacian(grid, v);
    return grid.cell_volume() * ((u * frac_v).sum() + (potential * u * v).sum());
}

Real v_norm_sq(const Grid& grid, const Field& potential, const Field& u) {
    return inner_product_v(grid, potential, u, u);
}

Real l2_norm(const Grid& grid, const Field& u) {
    require_on_grid(grid, u, "field");
    return std::sqrt(grid.cell_volume() * (u * u).sum());
}

void write_field_csv(const std::filesystem::path& path, const Field& field) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    char buffer[40];
    for (Eigen::Index i = 0; i < field.size(); ++i) {
        std::snprintf(buffer, sizeof buffer, "%.17g\n", field(i));
        out << buffer;
    }
    if (!out)
        throw Error("write to " + path.string() + " failed");
}

Field read_field_csv(const std::filesystem::path& path,
                     Eigen::Index expected_size) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::vector<Real> values;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty())
            continue;
        std::size_t consumed = 0;
        Real value = 0.0;
        try {
            value = std::stod(line, &consumed);
        } catch (const std::exception&) {
            throw Error(path.string() + ":" + std::to_string(line_number) +
                        ": not a number: '" + line + "'");
        }
        if (!std::isfinite(value))
            throw Error(path.string() + ":" + std::to_string(line_number) +
                        ": non-finite value");
        values.push_back(value);
    }
    if (expected_size >= 0 &&
        static_cast<Eigen::Index>(values.size()) != expected_size)
        throw Error(path.string() + ": expected " +
                    std::to_string(expected_size) + " values, found " +
                    std::to_string(values.size()));
    return Eigen::Map<const Field>(values.data(),
                                   static_cast<Eigen::Index>(values.size()));
}

} // namespace nrq
