#include "nlclaw/interaction.hpp"

#include <cmath>
#include <functional>

#include "nlclaw/fft.hpp"
#include "nlclaw/field_ops.hpp"
#include "nlclaw/kernels.hpp"

namespace nlclaw {

namespace {

using cd = std::complex<double>;

std::vector<cd> build_multiplier(const Grid& g, int axis,
                                 const std::function<cd(double xi_a, double xi_sq)>& m) {
    std::size_t ns = spectrum_size(g);
    std::vector<cd> out(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        if (spectral_is_nyquist(g, s, axis)) {
            out[s] = 0.0;
            continue;
        }
        double xi_sq = 0.0;
        for (int b = 0; b < g.dim; ++b) {
            double xb = spectral_xi(g, s, b);
            xi_sq += xb * xb;
        }
        out[s] = m(spectral_xi(g, s, axis), xi_sq);
    }
    return out;
}

}  // namespace

InteractionKernel InteractionKernel::hks(const Grid& g) {
    InteractionKernel k;
    k.grid_ = g;
    k.tag_ = KernelTag::hks;
    for (int a = 0; a < g.dim; ++a)
        k.multiplier_[a] = build_multiplier(g, a, [](double xi_a, double xi_sq) {
            return cd(0.0, xi_a / (1.0 + xi_sq));
        });
    k.finish_from_multipliers();
    return k;
}

InteractionKernel InteractionKernel::cgv(const Grid& g) {
    InteractionKernel k;
    k.grid_ = g;
    k.tag_ = KernelTag::cgv;
    for (int a = 0; a < g.dim; ++a)
        k.multiplier_[a] = build_multiplier(g, a, [](double xi_a, double xi_sq) {
            if (xi_sq == 0.0) return cd(0.0, 0.0);
            return cd(0.0, -xi_a / xi_sq);
        });
    k.finish_from_multipliers();
    return k;
}

InteractionKernel InteractionKernel::gaussian_gradient(const Grid& g, double sigma) {
    if (!(sigma > 2.0 * g.spacing()))
        throw resolution_error("gaussian-gradient kernel: sigma must exceed 2h");
    InteractionKernel k;
    k.grid_ = g;
    k.tag_ = KernelTag::gaussian_gradient;
    k.param_ = sigma;
    const double s2 = sigma * sigma;
    for (int a = 0; a < g.dim; ++a)
        k.multiplier_[a] = build_multiplier(g, a, [s2](double xi_a, double xi_sq) {
            return cd(0.0, xi_a * std::exp(-0.5 * s2 * xi_sq));
        });
    k.finish_from_multipliers();
    return k;
}

InteractionKernel InteractionKernel::box(const Grid& g, double half_width) {
    if (!(half_width > 0.0) || !(half_width < 0.5 * g.length))
        throw unsupported_error("box kernel: half-width must lie in (0, L/2)");
    InteractionKernel k;
    k.grid_ = g;
    k.tag_ = KernelTag::box;
    k.param_ = half_width;
    k.samples_ = VectorField(g);
    for (int iy = 0; iy < (g.dim == 2 ? g.n : 1); ++iy) {
        for (int ix = 0; ix < g.n; ++ix) {
            bool inside = std::abs(g.center(ix)) <= half_width;
            if (g.dim == 2) inside = inside && std::abs(g.center(iy)) <= half_width;
            if (!inside) continue;
            std::size_t idx = g.index(ix, iy);
            for (int a = 0; a < g.dim; ++a) k.samples_.comp[a][idx] = 1.0;
        }
    }
    k.finish_from_samples();
    return k;
}

InteractionKernel InteractionKernel::from_samples(VectorField samples) {
    InteractionKernel k;
    k.grid_ = samples.grid;
    k.tag_ = KernelTag::custom;
    k.samples_ = std::move(samples);
    for (int a = 0; a < k.grid_.dim; ++a) {
        Field c(k.grid_, k.samples_.comp[a]);
        if (!all_finite(c))
            throw invalid_field_error("kernel samples: non-finite values");
    }
    k.finish_from_samples();
    return k;
}

void InteractionKernel::finish_from_multipliers() {
    const Grid& g = grid_;
    const double invvol = 1.0 / g.cell_volume();
    samples_ = VectorField(g);
    std::vector<double> buf(g.cell_count());
    for (int a = 0; a < g.dim; ++a) {
        fft_inverse(g, multiplier_[a], buf);
        for (std::size_t i = 0; i < buf.size(); ++i) samples_.comp[a][i] = buf[i] * invvol;
    }

    // Divergence spectrally: contraction with i xi.
    std::size_t ns = spectrum_size(g);
    std::vector<cd> dhat(ns, cd(0.0, 0.0));
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t s = 0; s < ns; ++s)
            dhat[s] += cd(0.0, spectral_xi(g, s, a)) * multiplier_[a][s];
    fft_inverse(g, dhat, buf);
    stats_.div_tv = kernels::abs_sum(buf);  // h^d * sum(|div K|) with K = buf/h^d

    compute_common_stats();
}

void InteractionKernel::finish_from_samples() {
    const Grid& g = grid_;
    const double vol = g.cell_volume();
    std::size_t ns = spectrum_size(g);
    std::vector<cd> spec(ns);
    for (int a = 0; a < g.dim; ++a) {
        fft_forward(g, samples_.comp[a], spec);
        multiplier_[a].resize(ns);
        for (std::size_t s = 0; s < ns; ++s) multiplier_[a][s] = vol * spec[s];
    }

    Field div = divergence(samples_);
    stats_.div_tv = vol * kernels::abs_sum(div.values);

    compute_common_stats();

    // Sample/spectral consistency: convolving a delta spectrally must
    // reproduce the samples.
    Field delta(g);
    delta.values[0] = 1.0 / vol;
    std::vector<cd> uhat(ns);
    fft_forward(g, delta.values, uhat);
    std::vector<double> force(g.cell_count());
    std::vector<cd> prod(ns);
    for (int a = 0; a < g.dim; ++a) {
        for (std::size_t s = 0; s < ns; ++s) prod[s] = multiplier_[a][s] * uhat[s];
        fft_inverse(g, prod, force);
        double scale = std::max(1.0, kernels::max_abs(samples_.comp[a]));
        double err = kernels::max_abs_diff(force, samples_.comp[a]);
        if (!(err <= 1e-10 * scale))
            throw error("kernel: sample/spectral representations disagree on a delta");
    }
}

void InteractionKernel::compute_common_stats() {
    const Grid& g = grid_;
    double l1 = 0.0, linf = 0.0;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        double sq = 0.0;
        for (int a = 0; a < g.dim; ++a) sq += samples_.comp[a][i] * samples_.comp[a][i];
        double mag = std::sqrt(sq);
        l1 += mag;
        if (mag > linf) linf = mag;
    }
    stats_.l1_norm = g.cell_volume() * l1;
    stats_.linf_norm = linf;
    stats_.tv = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        Field c(g, samples_.comp[a]);
        stats_.tv += total_variation(c);
    }
}

}  // namespace nlclaw
