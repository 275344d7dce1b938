#include "nlclaw/field_ops.hpp"

#include <cmath>

#include "nlclaw/kernels.hpp"

namespace nlclaw {

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v))
        throw invalid_field_error(std::string(what) + ": non-finite values");
    return v;
}

}  // namespace

double mass(const Field& f) {
    return checked(f.grid.cell_volume() * kernels::sum(f.values), "mass");
}

double norm_l1(const Field& f) {
    return checked(f.grid.cell_volume() * kernels::abs_sum(f.values), "norm_l1");
}

double norm_linf(const Field& f) {
    return checked(kernels::max_abs(f.values), "norm_linf");
}

double distance_l1(const Field& f, const Field& g) {
    require_same_grid(f.grid, g.grid, "distance_l1");
    return checked(f.grid.cell_volume() * kernels::abs_diff_sum(f.values, g.values),
                   "distance_l1");
}

double distance_linf(const Field& f, const Field& g) {
    require_same_grid(f.grid, g.grid, "distance_linf");
    return checked(kernels::max_abs_diff(f.values, g.values), "distance_linf");
}

double total_variation(const Field& f) {
    const Grid& g = f.grid;
    double w = g.dim == 1 ? 1.0 : g.spacing();
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a) s += kernels::tv_axis(f.values, g.n, g.dim, a);
    return checked(w * s, "total_variation");
}

bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

VectorField gradient(const Field& f) {
    const Grid& g = f.grid;
    VectorField out(g);
    const double inv2h = 1.0 / (2.0 * g.spacing());
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            int im = (i == 0) ? n - 1 : i - 1;
            int ip = (i + 1 == n) ? 0 : i + 1;
            out.comp[0][i] = (f.values[ip] - f.values[im]) * inv2h;
        }
        return out;
    }
    for (int iy = 0; iy < n; ++iy) {
        int iym = (iy == 0) ? n - 1 : iy - 1;
        int iyp = (iy + 1 == n) ? 0 : iy + 1;
        for (int ix = 0; ix < n; ++ix) {
            int ixm = (ix == 0) ? n - 1 : ix - 1;
            int ixp = (ix + 1 == n) ? 0 : ix + 1;
            std::size_t idx = g.index(ix, iy);
            out.comp[0][idx] = (f.values[g.index(ixp, iy)] - f.values[g.index(ixm, iy)]) * inv2h;
            out.comp[1][idx] = (f.values[g.index(ix, iyp)] - f.values[g.index(ix, iym)]) * inv2h;
        }
    }
    return out;
}

Field divergence(const VectorField& v) {
    const Grid& g = v.grid;
    Field out(g);
    const double inv2h = 1.0 / (2.0 * g.spacing());
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            int im = (i == 0) ? n - 1 : i - 1;
            int ip = (i + 1 == n) ? 0 : i + 1;
            out.values[i] = (v.comp[0][ip] - v.comp[0][im]) * inv2h;
        }
        return out;
    }
    for (int iy = 0; iy < n; ++iy) {
        int iym = (iy == 0) ? n - 1 : iy - 1;
        int iyp = (iy + 1 == n) ? 0 : iy + 1;
        for (int ix = 0; ix < n; ++ix) {
            int ixm = (ix == 0) ? n - 1 : ix - 1;
            int ixp = (ix + 1 == n) ? 0 : ix + 1;
            std::size_t idx = g.index(ix, iy);
            out.values[idx] =
                (v.comp[0][g.index(ixp, iy)] - v.comp[0][g.index(ixm, iy)]) * inv2h +
                (v.comp[1][g.index(ix, iyp)] - v.comp[1][g.index(ix, iym)]) * inv2h;
        }
    }
    return out;
}

Field cyclic_shift(const Field& f, int offset_x, int offset_y) {
    const Grid& g = f.grid;
    Field out(g);
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) out.values[i] = f.values[g.wrap(i - offset_x)];
        return out;
    }
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
            out.values[g.index(ix, iy)] =
                f.values[g.index(g.wrap(ix - offset_x), g.wrap(iy - offset_y))];
    return out;
}

double vector_norm_linf(const VectorField& v) {
    const Grid& g = v.grid;
    double m = 0.0;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a) s += v.comp[a][i] * v.comp[a][i];
        s = std::sqrt(s);
        if (s > m || s != s) m = s;
    }
    return m;
}

}  // namespace nlclaw
