#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlclaw {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two fields/grids that were required to live on the same grid do not.
struct shape_error : error {
    using error::error;
};

/// A field contained non-finite values where finite ones were required.
struct invalid_field_error : error {
    using error::error;
};

/// An operation was asked for outside its supported envelope
/// (dimension, size caps, epsilon = 0 for the mild iterator, ...).
struct unsupported_error : error {
    using error::error;
};

/// A kernel or mollifier width is too small for the grid to resolve.
struct resolution_error : error {
    using error::error;
};

/// Uniform periodic grid on the d-torus [-L/2, L/2)^d, d in {1, 2}.
/// Cell centers: x_i = -L/2 + (i + 1/2) h with h = L / n (derived, never stored).
struct Grid {
    int dim = 1;
    int n = 0;
    double length = 1.0;

    double spacing() const { return length / n; }
    std::size_t cell_count() const {
        return dim == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n);
    }
    double cell_volume() const {
        double h = spacing();
        return dim == 1 ? h : h * h;
    }
    double center(int i) const { return -0.5 * length + (i + 0.5) * spacing(); }

    std::size_t index(int ix, int iy = 0) const {
        return std::size_t(iy) * std::size_t(n) + std::size_t(ix);
    }
    int wrap(int i) const {
        i %= n;
        return i < 0 ? i + n : i;
    }

    bool operator==(const Grid&) const = default;
};

Grid make_grid(int dim, int n, double length);

/// Scalar grid function, one value per cell, row-major (x fastest).
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0)
        : grid(g), values(g.cell_count(), fill) {}
    Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

/// Vector-valued grid function with one component per axis.
struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 2> comp;

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g) {
        for (int a = 0; a < g.dim; ++a) comp[a].assign(g.cell_count(), 0.0);
    }
    int dim() const { return grid.dim; }
};

void require_same_grid(const Grid& a, const Grid& b, const char* what = "fields");

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nlclaw
