// Timing table: OpenMP kernels vs the serial reference, per entry point.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "nlclaw/kernels.hpp"

namespace k = nlclaw::kernels;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_s, double parallel_s) {
    std::printf("%-22s %12.3f us %12.3f us %8.2fx\n", name, serial_s * 1e6,
                parallel_s * 1e6, serial_s / parallel_s);
}

}  // namespace

int main() {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    for (const std::size_t size : {std::size_t(1) << 16, std::size_t(1) << 20}) {
        const int n = static_cast<int>(std::lround(std::sqrt(double(size))));
        std::vector<double> a(size), b(size), f(size), fp(size), v(size);
        std::vector<double> flux(size), out(size);
        for (std::size_t i = 0; i < size; ++i) {
            a[i] = dist(rng);
            b[i] = dist(rng);
            f[i] = dist(rng);
            fp[i] = dist(rng);
            v[i] = dist(rng);
        }
        std::vector<std::complex<double>> spec(size / 2 + 1), mult(size / 2 + 1);
        for (auto& c : spec) c = {dist(rng), dist(rng)};
        for (auto& c : mult) c = {dist(rng), dist(rng)};

        const int reps = size > (std::size_t(1) << 18) ? 20 : 100;
        std::printf("\nsize = %zu (grid %d x %d)\n", size, n, n);
        std::printf("%-22s %15s %15s %9s\n", "kernel", "serial", "parallel",
                    "speedup");

        row("sum",
            time_of([&] { volatile double s = k::serial::sum(a); (void)s; }, reps),
            time_of([&] { volatile double s = k::sum(a); (void)s; }, reps));
        row("abs_sum",
            time_of([&] { volatile double s = k::serial::abs_sum(a); (void)s; }, reps),
            time_of([&] { volatile double s = k::abs_sum(a); (void)s; }, reps));
        row("max_abs",
            time_of([&] { volatile double s = k::serial::max_abs(a); (void)s; }, reps),
            time_of([&] { volatile double s = k::max_abs(a); (void)s; }, reps));
        row("abs_diff_sum",
            time_of([&] { volatile double s = k::serial::abs_diff_sum(a, b); (void)s; },
                    reps),
            time_of([&] { volatile double s = k::abs_diff_sum(a, b); (void)s; }, reps));
        row("tv_axis",
            time_of([&] { volatile double s = k::serial::tv_axis(a, n, 2, 0); (void)s; },
                    reps),
            time_of([&] { volatile double s = k::tv_axis(a, n, 2, 0); (void)s; }, reps));
        row("llf_interface_flux",
            time_of([&] { k::serial::llf_interface_flux(a, f, fp, v, n, 2, 0, flux); },
                    reps),
            time_of([&] { k::llf_interface_flux(a, f, fp, v, n, 2, 0, flux); }, reps));
        row("conservative_update",
            time_of([&] { k::serial::conservative_update(a, f, fp, n, 2, 0.1, 0.01, out); },
                    reps),
            time_of([&] { k::conservative_update(a, f, fp, n, 2, 0.1, 0.01, out); }, reps));
        row("half_sum",
            time_of([&] { k::serial::half_sum(a, b, out); }, reps),
            time_of([&] { k::half_sum(a, b, out); }, reps));
        row("spectral_multiply",
            time_of([&] {
                auto c = spec;
                k::serial::spectral_multiply(mult, c);
            }, reps),
            time_of([&] {
                auto c = spec;
                k::spectral_multiply(mult, c);
            }, reps));
    }
    return 0;
}
