#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Hot array loops. The default entry points run OpenMP-parallel above a size
// cutoff; `serial` holds the plain reference implementations kept for testing
// and benchmarking. Reductions use fixed-size blocking so the parallel results
// are bitwise reproducible for any thread count.
namespace nlclaw::kernels {

inline constexpr std::size_t block_size = 4096;
inline constexpr std::size_t parallel_cutoff = std::size_t(1) << 15;

double sum(std::span<const double> v);
double abs_sum(std::span<const double> v);
/// Max |v_i|; NaN if any element is NaN.
double max_abs(std::span<const double> v);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Sum of |u[i + e_axis] - u[i]| with periodic wrap (unweighted).
double tv_axis(std::span<const double> u, int n, int dim, int axis);

/// Local Lax-Friedrichs interface flux along one axis.
/// flux[i] couples cell i and its +axis neighbor:
///   F = 1/2 (f_i + f_ip) V_face - 1/2 max(|fp_i|, |fp_ip|) |V_face| (u_ip - u_i),
/// with V_face the arithmetic mean of the force component at the two centers.
void llf_interface_flux(std::span<const double> u, std::span<const double> f,
                        std::span<const double> fp, std::span<const double> v_axis,
                        int n, int dim, int axis, std::span<double> flux);

/// Fused conservative stage: out = u - dt/h * sum_axes(F_a[i] - F_a[i - e_a])
///                                 + eps*dt/h^2 * (second-difference Laplacian).
/// flux_y is ignored when dim == 1.
void conservative_update(std::span<const double> u, std::span<const double> flux_x,
                         std::span<const double> flux_y, int n, int dim,
                         double dt_over_h, double eps_dt_over_h2, std::span<double> out);

/// out = (a + b) / 2 (second SSP Runge-Kutta stage combine).
void half_sum(std::span<const double> a, std::span<const double> b, std::span<double> out);

/// a[i] *= m[i] on packed half-spectra.
void spectral_multiply(std::span<const std::complex<double>> m,
                       std::span<std::complex<double>> a);

namespace serial {

double sum(std::span<const double> v);
double abs_sum(std::span<const double> v);
double max_abs(std::span<const double> v);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double tv_axis(std::span<const double> u, int n, int dim, int axis);
void llf_interface_flux(std::span<const double> u, std::span<const double> f,
                        std::span<const double> fp, std::span<const double> v_axis,
                        int n, int dim, int axis, std::span<double> flux);
void conservative_update(std::span<const double> u, std::span<const double> flux_x,
                         std::span<const double> flux_y, int n, int dim,
                         double dt_over_h, double eps_dt_over_h2, std::span<double> out);
void half_sum(std::span<const double> a, std::span<const double> b, std::span<double> out);
void spectral_multiply(std::span<const std::complex<double>> m,
                       std::span<std::complex<double>> a);

}  // namespace serial

}  // namespace nlclaw::kernels
