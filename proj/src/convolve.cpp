#include "nlclaw/convolve.hpp"

#include <cmath>

#include "nlclaw/fft.hpp"
#include "nlclaw/kernels.hpp"

namespace nlclaw {

ForceEval convolve(const InteractionKernel& k, const Field& u) {
    const Grid& g = k.grid();
    require_same_grid(g, u.grid, "convolve");

    using cd = std::complex<double>;
    const std::size_t ns = spectrum_size(g);
    std::vector<cd> uhat(ns);
    fft_forward(g, u.values, uhat);

    ForceEval out;
    out.force = VectorField(g);
    out.div_force = Field(g);

    std::vector<cd> work(ns);
    std::vector<cd> dhat(ns, cd(0.0, 0.0));
    for (int a = 0; a < g.dim; ++a) {
        std::copy(uhat.begin(), uhat.end(), work.begin());
        kernels::spectral_multiply(k.multiplier(a), work);
        for (std::size_t s = 0; s < ns; ++s)
            dhat[s] += cd(0.0, spectral_xi(g, s, a)) * work[s];
        fft_inverse(g, work, out.force.comp[a]);
    }
    fft_inverse(g, dhat, out.div_force.values);
    return out;
}

double lipschitz_estimate(const VectorField& v) {
    const Grid& g = v.grid;
    const int n = g.n;
    const double inv_h = 1.0 / g.spacing();
    double m = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const auto& c = v.comp[a];
        if (g.dim == 1) {
            for (int i = 0; i < n; ++i) {
                int ip = (i + 1 == n) ? 0 : i + 1;
                double d = std::abs(c[ip] - c[i]) * inv_h;
                if (d > m) m = d;
            }
        } else {
            for (int iy = 0; iy < n; ++iy) {
                int iyp = (iy + 1 == n) ? 0 : iy + 1;
                for (int ix = 0; ix < n; ++ix) {
                    int ixp = (ix + 1 == n) ? 0 : ix + 1;
                    std::size_t idx = g.index(ix, iy);
                    double dx = std::abs(c[g.index(ixp, iy)] - c[idx]) * inv_h;
                    double dy = std::abs(c[g.index(ix, iyp)] - c[idx]) * inv_h;
                    if (dx > m) m = dx;
                    if (dy > m) m = dy;
                }
            }
        }
    }
    return m;
}

}  // namespace nlclaw
