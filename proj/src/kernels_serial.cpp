#include <cmath>

#include "nlclaw/kernels.hpp"

namespace nlclaw::kernels::serial {

double sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double abs_sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    bool nan = false;
    for (double x : v) {
        double a = std::abs(x);
        if (a > m) m = a;
        nan |= (x != x);
    }
    return nan ? std::nan("") : m;
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    bool nan = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = std::abs(a[i] - b[i]);
        if (d > m) m = d;
        nan |= (d != d);
    }
    return nan ? std::nan("") : m;
}

double tv_axis(std::span<const double> u, int n, int dim, int axis) {
    double s = 0.0;
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            int ip = (i + 1 == n) ? 0 : i + 1;
            s += std::abs(u[ip] - u[i]);
        }
        return s;
    }
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            std::size_t idx = std::size_t(iy) * n + ix;
            std::size_t idxp;
            if (axis == 0)
                idxp = std::size_t(iy) * n + ((ix + 1 == n) ? 0 : ix + 1);
            else
                idxp = std::size_t((iy + 1 == n) ? 0 : iy + 1) * n + ix;
            s += std::abs(u[idxp] - u[idx]);
        }
    }
    return s;
}

namespace {

inline double llf_at(std::span<const double> u, std::span<const double> f,
                     std::span<const double> fp, std::span<const double> v,
                     std::size_t idx, std::size_t idxp) {
    double vface = 0.5 * (v[idx] + v[idxp]);
    double lam = std::max(std::abs(fp[idx]), std::abs(fp[idxp])) * std::abs(vface);
    return 0.5 * (f[idx] + f[idxp]) * vface - 0.5 * lam * (u[idxp] - u[idx]);
}

}  // namespace

void llf_interface_flux(std::span<const double> u, std::span<const double> f,
                        std::span<const double> fp, std::span<const double> v_axis,
                        int n, int dim, int axis, std::span<double> flux) {
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            std::size_t ip = (i + 1 == n) ? 0 : i + 1;
            flux[i] = llf_at(u, f, fp, v_axis, i, ip);
        }
        return;
    }
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            std::size_t idx = std::size_t(iy) * n + ix;
            std::size_t idxp;
            if (axis == 0)
                idxp = std::size_t(iy) * n + ((ix + 1 == n) ? 0 : ix + 1);
            else
                idxp = std::size_t((iy + 1 == n) ? 0 : iy + 1) * n + ix;
            flux[idx] = llf_at(u, f, fp, v_axis, idx, idxp);
        }
    }
}

void conservative_update(std::span<const double> u, std::span<const double> flux_x,
                         std::span<const double> flux_y, int n, int dim,
                         double dt_over_h, double eps_dt_over_h2, std::span<double> out) {
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            int im = (i == 0) ? n - 1 : i - 1;
            int ip = (i + 1 == n) ? 0 : i + 1;
            double div = flux_x[i] - flux_x[im];
            double lap = u[ip] - 2.0 * u[i] + u[im];
            out[i] = u[i] - dt_over_h * div + eps_dt_over_h2 * lap;
        }
        return;
    }
    for (int iy = 0; iy < n; ++iy) {
        int iym = (iy == 0) ? n - 1 : iy - 1;
        int iyp = (iy + 1 == n) ? 0 : iy + 1;
        for (int ix = 0; ix < n; ++ix) {
            int ixm = (ix == 0) ? n - 1 : ix - 1;
            int ixp = (ix + 1 == n) ? 0 : ix + 1;
            std::size_t idx = std::size_t(iy) * n + ix;
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
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
}

void spectral_multiply(std::span<const std::complex<double>> m,
                       std::span<std::complex<double>> a) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= m[i];
}

}  // namespace nlclaw::kernels::serial
