#include "nlclaw/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <numbers>

namespace nlclaw {

namespace {

struct PlanSet {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex plan_mutex;
std::map<std::pair<int, int>, PlanSet>& plan_cache() {
    static std::map<std::pair<int, int>, PlanSet> cache;
    return cache;
}

PlanSet plans_for(const Grid& g) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(g.dim, g.n);
    auto it = plan_cache().find(key);
    if (it != plan_cache().end()) return it->second;

    std::size_t nr = g.cell_count();
    std::size_t nc = spectrum_size(g);
    double* real = fftw_alloc_real(nr);
    fftw_complex* cplx = fftw_alloc_complex(nc);
    PlanSet p;
    if (g.dim == 1) {
        p.r2c = fftw_plan_dft_r2c_1d(g.n, real, cplx, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_1d(g.n, cplx, real, FFTW_ESTIMATE);
    } else {
        p.r2c = fftw_plan_dft_r2c_2d(g.n, g.n, real, cplx, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_2d(g.n, g.n, cplx, real, FFTW_ESTIMATE);
    }
    fftw_free(real);
    fftw_free(cplx);
    plan_cache()[key] = p;
    return p;
}

}  // namespace

std::size_t spectrum_size(const Grid& g) {
    std::size_t half = std::size_t(g.n) / 2 + 1;
    return g.dim == 1 ? half : std::size_t(g.n) * half;
}

void fft_forward(const Grid& g, std::span<const double> in,
                 std::span<std::complex<double>> out) {
    if (in.size() != g.cell_count() || out.size() != spectrum_size(g))
        throw shape_error("fft_forward: buffer sizes do not match grid");
    PlanSet p = plans_for(g);
    double* real = fftw_alloc_real(in.size());
    fftw_complex* cplx = fftw_alloc_complex(out.size());
    std::memcpy(real, in.data(), in.size() * sizeof(double));
    fftw_execute_dft_r2c(p.r2c, real, cplx);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::complex<double>(cplx[i][0], cplx[i][1]);
    fftw_free(real);
    fftw_free(cplx);
}

void fft_inverse(const Grid& g, std::span<const std::complex<double>> in,
                 std::span<double> out) {
    if (out.size() != g.cell_count() || in.size() != spectrum_size(g))
        throw shape_error("fft_inverse: buffer sizes do not match grid");
    PlanSet p = plans_for(g);
    double* real = fftw_alloc_real(out.size());
    fftw_complex* cplx = fftw_alloc_complex(in.size());
    std::memcpy(cplx, in.data(), in.size() * sizeof(fftw_complex));
    fftw_execute_dft_c2r(p.c2r, cplx, real);
    const double scale = 1.0 / double(g.cell_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = real[i] * scale;
    fftw_free(real);
    fftw_free(cplx);
}

double spectral_xi(const Grid& g, std::size_t s, int axis) {
    const std::size_t half = std::size_t(g.n) / 2 + 1;
    long k;
    if (g.dim == 1) {
        k = long(s);
    } else if (axis == 0) {
        k = long(s % half);
    } else {
        long ky = long(s / half);
        k = ky <= g.n / 2 ? ky : ky - g.n;
    }
    return 2.0 * std::numbers::pi * double(k) / g.length;
}

bool spectral_is_nyquist(const Grid& g, std::size_t s, int axis) {
    if (g.n % 2 != 0) return false;
    const std::size_t half = std::size_t(g.n) / 2 + 1;
    long k;
    if (g.dim == 1)
        k = long(s);
    else if (axis == 0)
        k = long(s % half);
    else
        k = long(s / half);
    return k == g.n / 2;
}

}  // namespace nlclaw
