#include "nlclaw/initial_data.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "nlclaw/field_ops.hpp"
#include "nlclaw/snapshot.hpp"

namespace nlclaw {

namespace {

constexpr double kGaussNode = 0.7745966692414834;  // sqrt(3/5)
constexpr double kGaussW0 = 8.0 / 9.0;
constexpr double kGaussW1 = 5.0 / 9.0;

Field cell_average(const Grid& g, const std::function<double(double, double)>& u) {
    Field out(g);
    const double h = g.spacing();
    const double nodes[3] = {-kGaussNode * 0.5 * h, 0.0, kGaussNode * 0.5 * h};
    const double w[3] = {kGaussW1 * 0.5, kGaussW0 * 0.5, kGaussW1 * 0.5};
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) {
            double xc = g.center(i);
            double acc = 0.0;
            for (int q = 0; q < 3; ++q) acc += w[q] * u(xc + nodes[q], 0.0);
            out.values[i] = acc;
        }
        return out;
    }
    for (int iy = 0; iy < g.n; ++iy) {
        double yc = g.center(iy);
        for (int ix = 0; ix < g.n; ++ix) {
            double xc = g.center(ix);
            double acc = 0.0;
            for (int qy = 0; qy < 3; ++qy)
                for (int qx = 0; qx < 3; ++qx)
                    acc += w[qy] * w[qx] * u(xc + nodes[qx], yc + nodes[qy]);
            out.values[g.index(ix, iy)] = acc;
        }
    }
    return out;
}

Field step_average(const Grid& g, double left, double right, double pos) {
    Field out(g);
    const double h = g.spacing();
    auto row = [&](int ix) {
        double lo = g.center(ix) - 0.5 * h;
        double hi = g.center(ix) + 0.5 * h;
        double frac_left;  // fraction of the cell where x < pos
        if (hi <= pos)
            frac_left = 1.0;
        else if (lo >= pos)
            frac_left = 0.0;
        else
            frac_left = (pos - lo) / h;
        return frac_left * left + (1.0 - frac_left) * right;
    };
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) out.values[i] = row(i);
        return out;
    }
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) out.values[g.index(ix, iy)] = row(ix);
    return out;
}

}  // namespace

Field build_u0(const Grid& g, const U0Spec& spec) {
    using std::numbers::pi;
    Field out;
    switch (spec.kind) {
        case U0Spec::Kind::constant:
            out = Field(g, spec.value);
            break;
        case U0Spec::Kind::sine: {
            double wavenum = 2.0 * pi * spec.frequency / g.length;
            out = cell_average(g, [&](double x, double y) {
                double v = std::sin(wavenum * x);
                if (g.dim == 2) v *= std::sin(wavenum * y);
                return spec.mean + spec.amplitude * v;
            });
            break;
        }
        case U0Spec::Kind::step:
            if (!(spec.interface_pos >= -0.5 * g.length) ||
                !(spec.interface_pos < 0.5 * g.length))
                throw unsupported_error("u0 step: interface must lie in [-L/2, L/2)");
            out = step_average(g, spec.left, spec.right, spec.interface_pos);
            break;
        case U0Spec::Kind::gaussian_bump: {
            if (!(spec.width > 0.0))
                throw unsupported_error("u0 gaussian bump: width must be positive");
            double inv2w2 = 1.0 / (2.0 * spec.width * spec.width);
            out = cell_average(g, [&](double x, double y) {
                double r2 = (x - spec.center) * (x - spec.center);
                if (g.dim == 2) r2 += (y - spec.center) * (y - spec.center);
                return spec.baseline + spec.bump_amplitude * std::exp(-r2 * inv2w2);
            });
            break;
        }
        case U0Spec::Kind::file: {
            out = read_snapshot(spec.path);
            if (!(out.grid == g))
                throw shape_error("u0 file: snapshot grid does not match the run grid");
            break;
        }
    }
    if (!all_finite(out)) throw invalid_field_error("u0: non-finite values");
    return out;
}

}  // namespace nlclaw
