#pragma once

#include <array>
#include <complex>
#include <vector>

#include "nlclaw/core.hpp"

namespace nlclaw {

enum class KernelTag { hks, cgv, gaussian_gradient, box, custom };

struct KernelStats {
    double l1_norm;    // h^d * sum of Euclidean cell magnitudes
    double linf_norm;  // max Euclidean cell magnitude
    double tv;         // sum over components of discrete TV
    double div_tv;     // discrete L1 mass of the kernel divergence
};

/// Interaction kernel K with paired sample and spectral representations.
/// Analytic tags are spectral-primary (samples are the inverse transform);
/// box/custom kernels are sample-primary (multipliers are h^d * DFT of the
/// samples, checked for consistency by convolving a delta both ways).
///
/// The force K*u is realized per mode as multiplier(axis)[s] * u_hat[s]:
///   hks:               i xi_a / (1 + |xi|^2)      (K*u = grad S, -Lap S + S = u)
///   cgv:              -i xi_a / |xi|^2            (K*u = -grad v, -Lap v = u - mean u)
///   gaussian_gradient: i xi_a exp(-sigma^2 |xi|^2 / 2)
/// All gradient-type multipliers vanish on the zero mode and the unpaired
/// Nyquist modes of their own axis.
class InteractionKernel {
  public:
    static InteractionKernel hks(const Grid& g);
    static InteractionKernel cgv(const Grid& g);
    /// Requires sigma > 2h (resolution) and reasonably compact support on the torus.
    static InteractionKernel gaussian_gradient(const Grid& g, double sigma);
    /// Indicator of the centered box of half-width a (all components), 0 < a < L/2.
    static InteractionKernel box(const Grid& g, double half_width);
    static InteractionKernel from_samples(VectorField samples);

    const Grid& grid() const { return grid_; }
    KernelTag tag() const { return tag_; }
    const VectorField& samples() const { return samples_; }
    std::span<const std::complex<double>> multiplier(int axis) const {
        return multiplier_[axis];
    }
    const KernelStats& stats() const { return stats_; }
    /// sigma (gaussian_gradient) or half-width (box); 0 otherwise.
    double width_parameter() const { return param_; }

  private:
    InteractionKernel() = default;
    void finish_from_multipliers();
    void finish_from_samples();
    void compute_common_stats();

    Grid grid_;
    KernelTag tag_ = KernelTag::custom;
    double param_ = 0.0;
    VectorField samples_;
    std::array<std::vector<std::complex<double>>, 2> multiplier_;
    KernelStats stats_{0, 0, 0, 0};
};

}  // namespace nlclaw
