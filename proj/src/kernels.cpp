#include <cmath>
#include <vector>

#include "nlclaw/kernels.hpp"

namespace nlclaw::kernels {

namespace {

template <typename BlockFn>
double blocked_reduce_sum(std::size_t count, BlockFn&& block) {
    const std::size_t nb = (count + block_size - 1) / block_size;
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (long b = 0; b < long(nb); ++b) {
        std::size_t lo = std::size_t(b) * block_size;
        std::size_t hi = std::min(lo + block_size, count);
        partial[b] = block(lo, hi);
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace

double sum(std::span<const double> v) {
    if (v.size() < parallel_cutoff) return serial::sum(v);
    return blocked_reduce_sum(v.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    });
}

double abs_sum(std::span<const double> v) {
    if (v.size() < parallel_cutoff) return serial::abs_sum(v);
    return blocked_reduce_sum(v.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::abs(v[i]);
        return s;
    });
}

double max_abs(std::span<const double> v) {
    if (v.size() < parallel_cutoff) return serial::max_abs(v);
    const std::size_t nb = (v.size() + block_size - 1) / block_size;
    std::vector<double> partial(nb, 0.0);
    int nan = 0;
#pragma omp parallel for schedule(static) reduction(| : nan)
    for (long b = 0; b < long(nb); ++b) {
        std::size_t lo = std::size_t(b) * block_size;
        std::size_t hi = std::min(lo + block_size, v.size());
        double m = 0.0;
        bool block_nan = false;
        for (std::size_t i = lo; i < hi; ++i) {
            double a = std::abs(v[i]);
            if (a > m) m = a;
            block_nan |= (v[i] != v[i]);
        }
        partial[b] = m;
        nan |= int(block_nan);
    }
    if (nan) return std::nan("");
    double m = 0.0;
    for (double p : partial)
        if (p > m) m = p;
    return m;
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
    if (a.size() < parallel_cutoff) return serial::abs_diff_sum(a, b);
    return blocked_reduce_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::abs(a[i] - b[i]);
        return s;
    });
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() < parallel_cutoff) return serial::max_abs_diff(a, b);
    const std::size_t nb = (a.size() + block_size - 1) / block_size;
    std::vector<double> partial(nb, 0.0);
    int nan = 0;
#pragma omp parallel for schedule(static) reduction(| : nan)
    for (long blk = 0; blk < long(nb); ++blk) {
        std::size_t lo = std::size_t(blk) * block_size;
        std::size_t hi = std::min(lo + block_size, a.size());
        double m = 0.0;
        bool block_nan = false;
        for (std::size_t i = lo; i < hi; ++i) {
            double d = std::abs(a[i] - b[i]);
            if (d > m) m = d;
            block_nan |= (d != d);
        }
        partial[blk] = m;
        nan |= int(block_nan);
    }
    if (nan) return std::nan("");
    double m = 0.0;
    for (double p : partial)
        if (p > m) m = p;
    return m;
}

double tv_axis(std::span<const double> u, int n, int dim, int axis) {
    if (u.size() < parallel_cutoff) return serial::tv_axis(u, n, dim, axis);
    // dim == 2 here (1-D grids never reach the cutoff with n = cell count).
    const std::size_t nb = (u.size() + block_size - 1) / block_size;
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (long b = 0; b < long(nb); ++b) {
        std::size_t lo = std::size_t(b) * block_size;
        std::size_t hi = std::min(lo + block_size, u.size());
        double s = 0.0;
        for (std::size_t idx = lo; idx < hi; ++idx) {
            int ix = int(idx % std::size_t(n));
            int iy = int(idx / std::size_t(n));
            std::size_t idxp;
            if (axis == 0)
                idxp = std::size_t(iy) * n + ((ix + 1 == n) ? 0 : ix + 1);
            else
                idxp = std::size_t((iy + 1 == n) ? 0 : iy + 1) * n + ix;
            s += std::abs(u[idxp] - u[idx]);
        }
        partial[b] = s;
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

void llf_interface_flux(std::span<const double> u, std::span<const double> f,
                        std::span<const double> fp, std::span<const double> v_axis,
                        int n, int dim, int axis, std::span<double> flux) {
    if (u.size() < parallel_cutoff) {
        serial::llf_interface_flux(u, f, fp, v_axis, n, dim, axis, flux);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < long(u.size()); ++idx) {
        int ix = int(idx % n);
        int iy = int(idx / n);
        std::size_t idxp;
        if (dim == 1)
            idxp = (ix + 1 == n) ? 0 : std::size_t(ix) + 1;
        else if (axis == 0)
            idxp = std::size_t(iy) * n + ((ix + 1 == n) ? 0 : ix + 1);
        else
            idxp = std::size_t((iy + 1 == n) ? 0 : iy + 1) * n + ix;
        double vface = 0.5 * (v_axis[idx] + v_axis[idxp]);
        double lam = std::max(std::abs(fp[idx]), std::abs(fp[idxp])) * std::abs(vface);
        flux[idx] = 0.5 * (f[idx] + f[idxp]) * vface - 0.5 * lam * (u[idxp] - u[idx]);
    }
}

void conservative_update(std::span<const double> u, std::span<const double> flux_x,
                         std::span<const double> flux_y, int n, int dim,
                         double dt_over_h, double eps_dt_over_h2, std::span<double> out) {
    if (u.size() < parallel_cutoff) {
        serial::conservative_update(u, flux_x, flux_y, n, dim, dt_over_h, eps_dt_over_h2,
                                    out);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < long(u.size()); ++idx) {
        int ix = int(idx % n);
        int iy = int(idx / n);
        int ixm = (ix == 0) ? n - 1 : ix - 1;
        int ixp = (ix + 1 == n) ? 0 : ix + 1;
        if (dim == 1) {
            double div = flux_x[idx] - flux_x[ixm];
            double lap = u[ixp] - 2.0 * u[idx] + u[ixm];
            out[idx] = u[idx] - dt_over_h * div + eps_dt_over_h2 * lap;
        } else {
            int iym = (iy == 0) ? n - 1 : iy - 1;
            int iyp = (iy + 1 == n) ? 0 : iy + 1;
            double div = (flux_x[idx] - flux_x[std::size_t(iy) * n + ixm]) +
                         (flux_y[idx] - flux_y[std::size_t(iym) * n + ix]);
            double lap = u[std::size_t(iy) * n + ixp] + u[std::size_t(iy) * n + ixm] +
                         u[std::size_t(iyp) * n + ix] + u[std::size_t(iym) * n + ix] -
                         4.0 * u[idx];
            out[idx] = u[idx] - dt_over_h * div + eps_dt_over_h2 * lap;
        }
    }
}

void half_sum(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    if (a.size() < parallel_cutoff) {
        serial::half_sum(a, b, out);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < long(a.size()); ++i) out[i] = 0.5 * (a[i] + b[i]);
}

void spectral_multiply(std::span<const std::complex<double>> m,
                       std::span<std::complex<double>> a) {
    if (a.size() < parallel_cutoff) {
        serial::spectral_multiply(m, a);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < long(a.size()); ++i) a[i] *= m[i];
}

}  // namespace nlclaw::kernels
