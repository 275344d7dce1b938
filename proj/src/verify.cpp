#include "nlclaw/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nlclaw/convolve.hpp"
#include "nlclaw/field_ops.hpp"
#include "nlclaw/kernels.hpp"

namespace nlclaw {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

int wr(int i, int n) { return ((i % n) + n) % n; }

double check_uniform_times(std::span<const State> traj, const char* what) {
    if (traj.size() < 2) throw resolution_error(std::string(what) + ": need at least 2 snapshots");
    const double dt = traj[1].time - traj[0].time;
    if (!(dt > 0.0)) throw resolution_error(std::string(what) + ": snapshot times must increase");
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double step = traj[i].time - traj[i - 1].time;
        if (std::abs(step - dt) > 1e-9 * std::max(1.0, dt))
            throw resolution_error(std::string(what) + ": uniform snapshot spacing required");
    }
    return dt;
}

// Quartic bump profile (15/16)(1 - s^2)^2 on [-1, 1].
double bump(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double w = 1.0 - s * s;
    return (15.0 / 16.0) * w * w;
}

double bump_deriv(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return -(15.0 / 4.0) * s * (1.0 - s * s);
}

// psi(x+y) and phi(x-y) land on grid nodes, halfway between cell centers;
// both are evaluated there by averaging the two adjacent cells (four in 2-d).
// Tables are indexed by the wrapped index sum s = wr(i+j) / difference
// k = wr(i-j) per axis.
std::vector<double> node_sum_table(const Field& psi) {
    const int n = psi.grid.n;
    const int n2 = n / 2;
    const int dim = psi.grid.dim;
    std::vector<double> out(psi.size());
    if (dim == 1) {
        for (int s = 0; s < n; ++s)
            out[s] = 0.5 * (psi.values[wr(s + n2, n)] + psi.values[wr(s + n2 + 1, n)]);
    } else {
        for (int sy = 0; sy < n; ++sy)
            for (int sx = 0; sx < n; ++sx) {
                const int x0 = wr(sx + n2, n), x1 = wr(sx + n2 + 1, n);
                const int y0 = wr(sy + n2, n), y1 = wr(sy + n2 + 1, n);
                out[static_cast<std::size_t>(sy) * n + sx] =
                    0.25 * (psi.values[static_cast<std::size_t>(y0) * n + x0] +
                            psi.values[static_cast<std::size_t>(y0) * n + x1] +
                            psi.values[static_cast<std::size_t>(y1) * n + x0] +
                            psi.values[static_cast<std::size_t>(y1) * n + x1]);
            }
    }
    return out;
}

std::vector<double> node_diff_table(const Field& phi) {
    const int n = phi.grid.n;
    const int n2 = n / 2;
    const int dim = phi.grid.dim;
    std::vector<double> out(phi.size());
    if (dim == 1) {
        for (int k = 0; k < n; ++k)
            out[k] = 0.5 * (phi.values[wr(k + n2 - 1, n)] + phi.values[wr(k + n2, n)]);
    } else {
        for (int ky = 0; ky < n; ++ky)
            for (int kx = 0; kx < n; ++kx) {
                const int x0 = wr(kx + n2 - 1, n), x1 = wr(kx + n2, n);
                const int y0 = wr(ky + n2 - 1, n), y1 = wr(ky + n2, n);
                out[static_cast<std::size_t>(ky) * n + kx] =
                    0.25 * (phi.values[static_cast<std::size_t>(y0) * n + x0] +
                            phi.values[static_cast<std::size_t>(y0) * n + x1] +
                            phi.values[static_cast<std::size_t>(y1) * n + x0] +
                            phi.values[static_cast<std::size_t>(y1) * n + x1]);
            }
    }
    return out;
}

void validate_instance(const LemmaInstance& inst) {
    require_same_grid(inst.grid, inst.a.grid);
    require_same_grid(inst.grid, inst.b.grid);
    require_same_grid(inst.grid, inst.psi.grid);
    require_same_grid(inst.grid, inst.phi.grid);
    require_same_grid(inst.grid, inst.V.grid);
    if (inst.grid.n % 2 != 0)
        throw unsupported_error("doubled-variable checks require an even grid size");
    for (double p : inst.psi.values)
        if (!(p >= 0.0)) throw invalid_field_error("psi must be nonnegative");
    const int n = inst.grid.n;
    const int dim = inst.grid.dim;
    for (std::size_t i = 0; i < inst.phi.size(); ++i) {
        if (inst.phi.values[i] == 0.0) continue;
        const int ix = static_cast<int>(i) % n;
        const int iy = dim == 2 ? static_cast<int>(i) / n : n / 2;
        if (ix < 2 || ix > n - 3 || iy < 2 || iy > n - 3)
            throw invalid_field_error(
                "phi support touches the periodic boundary (wrap contamination)");
    }
}

struct LemmaCommon {
    std::vector<double> fa, fb;      // f(a(x)), f(b(y))
    std::vector<double> psiN, phiN;  // node tables
    double maxpsi, tvb, supfp;
};

LemmaCommon lemma_common(const LemmaInstance& inst) {
    validate_instance(inst);
    LemmaCommon c;
    const std::size_t N = inst.grid.cell_count();
    c.fa.resize(N);
    c.fb.resize(N);
    std::vector<double> scratch(N);
    inst.mobility.eval_arrays(inst.a.values, c.fa, scratch);
    inst.mobility.eval_arrays(inst.b.values, c.fb, scratch);
    c.psiN = node_sum_table(inst.psi);
    c.phiN = node_diff_table(inst.phi);
    c.maxpsi = norm_linf(inst.psi);
    c.tvb = total_variation(inst.b);
    c.supfp = inst.mobility.bounds(2.0 * norm_linf(inst.b)).sup_fprime;
    return c;
}

LemmaCheck finish_check(double lhs, double rhs) {
    LemmaCheck out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.slack = 0.05 * (std::abs(lhs) + rhs) + 1e-8;
    out.pass = lhs <= rhs + out.slack;
    return out;
}

}  // namespace

double kruzhkov_eta(double k, double u) { return std::abs(u - k); }

double kruzhkov_q(double k, double u, const Mobility& f) {
    const double s = sgn(u - k);
    if (s == 0.0) return 0.0;
    return s * (f(u) - f(k));
}

EntropyResidualResult entropy_residual(std::span<const State> trajectory,
                                       const Problem& problem,
                                       std::span<const KruzhkovLevel> levels) {
    if (trajectory.size() < 3)
        throw resolution_error("entropy residual needs at least 3 snapshots");
    const Grid& g = problem.grid;
    for (const State& s : trajectory) require_same_grid(g, s.u.grid);
    const double dt = check_uniform_times(trajectory, "entropy residual");

    const int n = g.n;
    const int dim = g.dim;
    const double h = g.spacing();
    const std::size_t N = g.cell_count();
    const std::size_t M = trajectory.size();

    struct Snap {
        std::vector<double> f, fp;
        ForceEval force;
    };
    std::vector<Snap> pre(M);
    for (std::size_t m = 0; m < M; ++m) {
        pre[m].f.resize(N);
        pre[m].fp.resize(N);
        problem.mobility.eval_arrays(trajectory[m].u.values, pre[m].f, pre[m].fp);
        pre[m].force = convolve(problem.kernel, trajectory[m].u);
    }

    EntropyResidualResult out;
    out.worst_residual = Field(g);

    std::vector<double> eta_c(N), q(N), r(N), tmp(N);
    std::array<std::vector<double>, 2> flux;
    for (int a = 0; a < dim; ++a) flux[a].resize(N);

    bool have_worst = false;
    for (std::size_t m = 1; m + 1 < M; ++m) {
        const std::vector<double>& uc = trajectory[m].u.values;
        const std::vector<double>& up = trajectory[m - 1].u.values;
        const std::vector<double>& un = trajectory[m + 1].u.values;
        for (const KruzhkovLevel& lv : levels) {
            const double k = lv.k;
            const double fk = problem.mobility(k);
            for (std::size_t i = 0; i < N; ++i) {
                eta_c[i] = std::abs(uc[i] - k);
                const double s = sgn(uc[i] - k);
                q[i] = s == 0.0 ? 0.0 : s * (pre[m].f[i] - fk);
            }
            for (int a = 0; a < dim; ++a)
                kernels::llf_interface_flux(eta_c, q, pre[m].fp,
                                            pre[m].force.force.comp[a], n, dim, a,
                                            flux[a]);
            const std::vector<double>& divv = pre[m].force.div_force.values;
            for (std::size_t i = 0; i < N; ++i) {
                const int ix = static_cast<int>(i) % n;
                const int iy = dim == 2 ? static_cast<int>(i) / n : 0;
                double divq = flux[0][i] - flux[0][static_cast<std::size_t>(iy) * n + wr(ix - 1, n)];
                if (dim == 2)
                    divq += flux[1][i] - flux[1][static_cast<std::size_t>(wr(iy - 1, n)) * n + ix];
                const double s = sgn(uc[i] - k);
                r[i] = (std::abs(un[i] - k) - std::abs(up[i] - k)) / (2.0 * dt) +
                       divq / h + (s * pre[m].f[i] - q[i]) * divv[i];
            }
            // 3-cell box smoothing, one pass per axis
            for (std::size_t i = 0; i < N; ++i) {
                const int ix = static_cast<int>(i) % n;
                const std::size_t row = i - static_cast<std::size_t>(ix);
                tmp[i] = (r[row + wr(ix - 1, n)] + r[i] + r[row + wr(ix + 1, n)]) / 3.0;
            }
            if (dim == 2) {
                for (std::size_t i = 0; i < N; ++i) {
                    const int ix = static_cast<int>(i) % n;
                    const int iy = static_cast<int>(i) / n;
                    r[i] = (tmp[static_cast<std::size_t>(wr(iy - 1, n)) * n + ix] + tmp[i] +
                            tmp[static_cast<std::size_t>(wr(iy + 1, n)) * n + ix]) / 3.0;
                }
            } else {
                r.swap(tmp);
            }
            double local_max = 0.0;
            for (std::size_t i = 0; i < N; ++i) local_max = std::max(local_max, r[i]);
            if (!have_worst || local_max > out.max_positive) {
                have_worst = true;
                out.max_positive = std::max(0.0, local_max);
                out.worst_level = k;
                out.worst_time = trajectory[m].time;
                out.worst_residual.values = r;
            }
        }
    }
    return out;
}

LemmaCheck check_lemma_a(const LemmaInstance& inst) {
    LemmaCommon c = lemma_common(inst);
    const int n = inst.grid.n;
    const int dim = inst.grid.dim;
    const double h = inst.grid.spacing();
    const std::size_t N = inst.grid.cell_count();

    double acc = 0.0;
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            const double vx = inst.V.comp[0][i];
            if (vx == 0.0) continue;
            const double ai = inst.a.values[i];
            const double fai = c.fa[i];
            double row = 0.0;
            for (int j = 0; j < n; ++j) {
                const int s = wr(i + j, n);
                const int k = wr(i - j, n);
                const double dP = (c.psiN[wr(s + 1, n)] * c.phiN[wr(k - 1, n)] -
                                   c.psiN[wr(s - 1, n)] * c.phiN[wr(k + 1, n)]) / (2.0 * h);
                row += dP * sgn(ai - inst.b.values[j]) * (fai - c.fb[j]);
            }
            acc += vx * row;
        }
    } else {
        for (std::size_t i = 0; i < N; ++i) {
            const int ix = static_cast<int>(i) % n;
            const int iy = static_cast<int>(i) / n;
            const double v0 = inst.V.comp[0][i];
            const double v1 = inst.V.comp[1][i];
            const double ai = inst.a.values[i];
            const double fai = c.fa[i];
            double row = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                const int jx = static_cast<int>(j) % n;
                const int jy = static_cast<int>(j) / n;
                const int sx = wr(ix + jx, n), sy = wr(iy + jy, n);
                const int kx = wr(ix - jx, n), ky = wr(iy - jy, n);
                const auto psi_at = [&](int px, int py) {
                    return c.psiN[static_cast<std::size_t>(py) * n + px];
                };
                const auto phi_at = [&](int px, int py) {
                    return c.phiN[static_cast<std::size_t>(py) * n + px];
                };
                const double dPx = (psi_at(wr(sx + 1, n), sy) * phi_at(wr(kx - 1, n), ky) -
                                    psi_at(wr(sx - 1, n), sy) * phi_at(wr(kx + 1, n), ky)) / (2.0 * h);
                const double dPy = (psi_at(sx, wr(sy + 1, n)) * phi_at(kx, wr(ky - 1, n)) -
                                    psi_at(sx, wr(sy - 1, n)) * phi_at(kx, wr(ky + 1, n))) / (2.0 * h);
                row += (v0 * dPx + v1 * dPy) * sgn(ai - inst.b.values[j]) * (fai - c.fb[j]);
            }
            acc += row;
        }
    }
    const double vol2 = std::pow(h, 2 * dim);
    const double lhs = vol2 * acc;
    const double rhs = c.maxpsi * norm_l1(inst.phi) * c.tvb * vector_norm_linf(inst.V) * c.supfp;
    return finish_check(lhs, rhs);
}

LemmaCheck check_lemma_b(const LemmaInstance& inst) {
    LemmaCommon c = lemma_common(inst);
    const int n = inst.grid.n;
    const int dim = inst.grid.dim;
    const double h = inst.grid.spacing();
    const std::size_t N = inst.grid.cell_count();

    double acc = 0.0;
    if (dim == 1) {
        const std::vector<double>& V = inst.V.comp[0];
        for (int i = 0; i < n; ++i) {
            const double vi = V[i];
            const double ai = inst.a.values[i];
            const double fai = c.fa[i];
            double row = 0.0;
            for (int j = 0; j < n; ++j) {
                const int s = wr(i + j, n);
                const int k = wr(i - j, n);
                const int jp = wr(j + 1, n), jm = wr(j - 1, n);
                const double dH =
                    (c.psiN[wr(s + 1, n)] * c.phiN[wr(k - 1, n)] * (vi - V[jp]) -
                     c.psiN[wr(s - 1, n)] * c.phiN[wr(k + 1, n)] * (vi - V[jm])) / (2.0 * h);
                row += dH * sgn(ai - inst.b.values[j]) * (fai - c.fb[j]);
            }
            acc += row;
        }
    } else {
        for (std::size_t i = 0; i < N; ++i) {
            const int ix = static_cast<int>(i) % n;
            const int iy = static_cast<int>(i) / n;
            const double v0 = inst.V.comp[0][i];
            const double v1 = inst.V.comp[1][i];
            const double ai = inst.a.values[i];
            const double fai = c.fa[i];
            double row = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                const int jx = static_cast<int>(j) % n;
                const int jy = static_cast<int>(j) / n;
                const int sx = wr(ix + jx, n), sy = wr(iy + jy, n);
                const int kx = wr(ix - jx, n), ky = wr(iy - jy, n);
                const auto psi_at = [&](int px, int py) {
                    return c.psiN[static_cast<std::size_t>(py) * n + px];
                };
                const auto phi_at = [&](int px, int py) {
                    return c.phiN[static_cast<std::size_t>(py) * n + px];
                };
                const std::size_t jxp = static_cast<std::size_t>(jy) * n + wr(jx + 1, n);
                const std::size_t jxm = static_cast<std::size_t>(jy) * n + wr(jx - 1, n);
                const std::size_t jyp = static_cast<std::size_t>(wr(jy + 1, n)) * n + jx;
                const std::size_t jym = static_cast<std::size_t>(wr(jy - 1, n)) * n + jx;
                const double dHx =
                    (psi_at(wr(sx + 1, n), sy) * phi_at(wr(kx - 1, n), ky) * (v0 - inst.V.comp[0][jxp]) -
                     psi_at(wr(sx - 1, n), sy) * phi_at(wr(kx + 1, n), ky) * (v0 - inst.V.comp[0][jxm])) / (2.0 * h);
                const double dHy =
                    (psi_at(sx, wr(sy + 1, n)) * phi_at(kx, wr(ky - 1, n)) * (v1 - inst.V.comp[1][jyp]) -
                     psi_at(sx, wr(sy - 1, n)) * phi_at(kx, wr(ky + 1, n)) * (v1 - inst.V.comp[1][jym])) / (2.0 * h);
                row += (dHx + dHy) * sgn(ai - inst.b.values[j]) * (fai - c.fb[j]);
            }
            acc += row;
        }
    }
    const double vol2 = std::pow(h, 2 * dim);
    const double lhs = vol2 * acc;

    double m1 = 0.0;
    for (std::size_t i = 0; i < inst.phi.size(); ++i) {
        const int ix = static_cast<int>(i) % n;
        double x = inst.grid.center(ix);
        double dist = std::abs(x);
        if (dim == 2) {
            const double y = inst.grid.center(static_cast<int>(i) / n);
            dist = std::hypot(x, y);
        }
        m1 += dist * std::abs(inst.phi.values[i]);
    }
    m1 *= inst.grid.cell_volume();

    const double rhs = c.maxpsi * c.supfp * c.tvb * lipschitz_estimate(inst.V) * m1;
    return finish_check(lhs, rhs);
}

LemmaInstance random_lemma_instance(const Grid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n = grid.n;
    const int dim = grid.dim;
    const double L = grid.length;
    const double h = grid.spacing();
    const double two_pi = 2.0 * std::numbers::pi;

    const auto piecewise_axis = [&](std::vector<double>& prof) {
        prof.assign(n, 0.0);
        std::uniform_int_distribution<int> nb(3, 8);
        const int blocks = nb(rng);
        std::vector<int> cuts{0};
        std::uniform_int_distribution<int> pos(1, n - 1);
        for (int b = 1; b < blocks; ++b) cuts.push_back(pos(rng));
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(n);
        for (std::size_t b = 0; b + 1 < cuts.size(); ++b) {
            const double level = 2.0 * U(rng) - 1.0;
            for (int i = cuts[b]; i < cuts[b + 1]; ++i) prof[i] = level;
        }
    };
    const auto piecewise_field = [&](Field& f) {
        f = Field(grid);
        std::vector<double> px, py;
        piecewise_axis(px);
        if (dim == 2) piecewise_axis(py);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const int ix = static_cast<int>(i) % n;
            f.values[i] = px[ix];
            if (dim == 2) f.values[i] += py[static_cast<int>(i) / n];
        }
    };
    const auto trig_axis = [&](std::vector<double>& prof) {
        prof.assign(n, 0.0);
        for (int k = 1; k <= 3; ++k) {
            const double c = (2.0 * U(rng) - 1.0) / k;
            const double s = (2.0 * U(rng) - 1.0) / k;
            for (int i = 0; i < n; ++i) {
                const double x = grid.center(i);
                prof[i] += c * std::cos(two_pi * k * x / L) + s * std::sin(two_pi * k * x / L);
            }
        }
    };

    LemmaInstance inst;
    inst.grid = grid;
    piecewise_field(inst.a);
    piecewise_field(inst.b);

    inst.V.grid = grid;
    for (int a = 0; a < dim; ++a) {
        inst.V.comp[a].assign(grid.cell_count(), 0.0);
        std::vector<double> tx, ty;
        trig_axis(tx);
        if (dim == 2) trig_axis(ty);
        for (std::size_t i = 0; i < inst.V.comp[a].size(); ++i) {
            const int ix = static_cast<int>(i) % n;
            inst.V.comp[a][i] = tx[ix];
            if (dim == 2) inst.V.comp[a][i] += ty[static_cast<int>(i) / n];
        }
    }

    inst.psi = Field(grid);
    {
        const double x0 = L * U(rng);
        const double amp = dim == 1 ? 0.9 : 0.45;
        const double y0 = L * U(rng);
        for (std::size_t i = 0; i < inst.psi.size(); ++i) {
            const int ix = static_cast<int>(i) % n;
            double v = 1.0 + amp * std::sin(two_pi * (grid.center(ix) - x0) / L);
            if (dim == 2)
                v += amp * std::sin(two_pi * (grid.center(static_cast<int>(i) / n) - y0) / L);
            inst.psi.values[i] = v;
        }
    }

    inst.phi = Field(grid);
    {
        const double lo = -0.5 * L + 2.5 * h;
        const double hi = 0.5 * L - 2.5 * h;
        const double amp = (U(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * U(rng));
        double cx[2], wx[2];
        for (int a = 0; a < dim; ++a) {
            cx[a] = lo + (hi - lo) * (0.2 + 0.6 * U(rng));
            const double wmax = 0.9 * std::min(cx[a] - lo, hi - cx[a]);
            wx[a] = std::min((0.05 + 0.1 * U(rng)) * L, wmax);
        }
        for (std::size_t i = 0; i < inst.phi.size(); ++i) {
            const int ix = static_cast<int>(i) % n;
            double v = amp * bump((grid.center(ix) - cx[0]) / wx[0]);
            if (dim == 2)
                v *= bump((grid.center(static_cast<int>(i) / n) - cx[1]) / wx[1]);
            inst.phi.values[i] = v;
        }
    }

    inst.mobility = Mobility::logistic();
    return inst;
}

double MollifierPair::phi_space(double x) const {
    return space_scale * bump(x / delta) / delta;
}

double MollifierPair::dphi_space(double x) const {
    return space_scale * bump_deriv(x / delta) / (delta * delta);
}

double MollifierPair::phi_time(double t) const {
    return time_scale * bump(t / eta) / eta;
}

double MollifierPair::dphi_time(double t) const {
    return time_scale * bump_deriv(t / eta) / (eta * eta);
}

MollifierPair make_mollifier_pair(const Grid& grid, double snapshot_dt,
                                  double delta, double eta) {
    if (grid.dim != 1) throw unsupported_error("mollifier pairs are 1-d only");
    if (!(delta > 0.0) || !(eta > 0.0))
        throw resolution_error("mollifier widths must be positive");
    if (delta > 0.5 * grid.length)
        throw resolution_error("space mollifier wider than the half-torus");
    if (!(snapshot_dt > 0.0))
        throw resolution_error("snapshot spacing must be positive");

    MollifierPair m;
    m.delta = delta;
    m.eta = eta;

    const int n = grid.n;
    const double h = grid.spacing();
    double smass = 0.0;
    for (int k = 0; k < n; ++k) {
        const double z = (k <= n / 2 ? k : k - n) * h;
        smass += bump(z / delta) / delta;
    }
    smass *= h;
    if (!(smass > 0.0)) throw resolution_error("space mollifier unresolved on the grid");
    m.space_scale = 1.0 / smass;

    double tmass = bump(0.0) / eta;
    for (int j = 1; j * snapshot_dt < eta; ++j)
        tmass += 2.0 * bump(j * snapshot_dt / eta) / eta;
    tmass *= snapshot_dt;
    m.time_scale = 1.0 / tmass;
    return m;
}

double kuznetsov_delta(std::span<const State> u_trajectory,
                       std::span<const State> v_trajectory,
                       const Problem& problem, const MollifierPair& mollifier) {
    const Grid& g = problem.grid;
    if (g.dim != 1) throw unsupported_error("the doubled functional is 1-d only");
    if (g.n > 128) throw unsupported_error("grid too large for the doubled functional (n <= 128)");
    if (u_trajectory.size() != v_trajectory.size())
        throw shape_error("trajectories must share output times");
    if (u_trajectory.size() > 64)
        throw unsupported_error("too many snapshots for the doubled functional (<= 64)");
    const double dt = check_uniform_times(u_trajectory, "doubled functional");
    for (std::size_t i = 0; i < u_trajectory.size(); ++i) {
        require_same_grid(g, u_trajectory[i].u.grid);
        require_same_grid(g, v_trajectory[i].u.grid);
        if (std::abs(u_trajectory[i].time - v_trajectory[i].time) > 1e-9 * std::max(1.0, dt))
            throw shape_error("trajectories must share output times");
    }

    const int n = g.n;
    const double h = g.spacing();
    const int M = static_cast<int>(u_trajectory.size());

    // difference tables over the node lattice
    std::vector<double> p1(n), d1(n);
    for (int k = 0; k < n; ++k) {
        const double z = (k <= n / 2 ? k : k - n) * h;
        p1[k] = mollifier.phi_space(z);
        d1[k] = mollifier.dphi_space(z);
    }
    std::vector<double> p2(2 * M - 1), d2(2 * M - 1);
    for (int m = -(M - 1); m <= M - 1; ++m) {
        p2[m + M - 1] = mollifier.phi_time(m * dt);
        d2[m + M - 1] = mollifier.dphi_time(m * dt);
    }

    std::vector<std::vector<double>> fu(M), fv(M), Vv(M), divVv(M);
    std::vector<double> scratch(g.cell_count());
    for (int m = 0; m < M; ++m) {
        fu[m].resize(g.cell_count());
        fv[m].resize(g.cell_count());
        problem.mobility.eval_arrays(u_trajectory[m].u.values, fu[m], scratch);
        problem.mobility.eval_arrays(v_trajectory[m].u.values, fv[m], scratch);
        ForceEval fe = convolve(problem.kernel, v_trajectory[m].u);
        Vv[m] = std::move(fe.force.comp[0]);
        divVv[m] = std::move(fe.div_force.values);
    }

    const auto tw = [&](int i) { return (i == 0 || i == M - 1) ? 0.5 * dt : dt; };
    const double vol2 = h * h;

    // boundary terms at s = T and s = 0
    double t1 = 0.0, t2 = 0.0;
    for (int i = 0; i < M; ++i) {
        const double wt = tw(i);
        const double p2_term = p2[i];            // phi2(t_i - T)
        const double p2_init = p2[i + (M - 1)];  // phi2(t_i - 0)
        if (p2_term == 0.0 && p2_init == 0.0) continue;
        const std::vector<double>& ui = u_trajectory[i].u.values;
        const std::vector<double>& vT = v_trajectory[M - 1].u.values;
        const std::vector<double>& v0 = v_trajectory[0].u.values;
        double sT = 0.0, s0 = 0.0;
        for (int x = 0; x < n; ++x) {
            for (int y = 0; y < n; ++y) {
                const double w = p1[wr(x - y, n)];
                if (w == 0.0) continue;
                sT += w * std::abs(ui[x] - vT[y]);
                s0 += w * std::abs(ui[x] - v0[y]);
            }
        }
        t1 -= wt * p2_term * vol2 * sT;
        t2 += wt * p2_init * vol2 * s0;
    }

    // interaction terms over (t_i, s_j)
    std::vector<double> partial(M, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < M; ++i) {
        const std::vector<double>& ui = u_trajectory[i].u.values;
        double acc = 0.0;
        for (int j = 0; j < M; ++j) {
            const double wij = tw(i) * tw(j);
            const double phi2 = p2[i - j + (M - 1)];
            const double dphi2_s = -d2[i - j + (M - 1)];  // d/ds phi2(t - s)
            if (phi2 == 0.0 && dphi2_s == 0.0) continue;
            const std::vector<double>& vj = v_trajectory[j].u.values;
            double st = 0.0;   // time-mollifier derivative term
            double sfl = 0.0;  // transport term
            double sdv = 0.0;  // divergence term
            for (int x = 0; x < n; ++x) {
                const double uix = ui[x];
                const double fux = fu[i][x];
                for (int y = 0; y < n; ++y) {
                    const int k = wr(x - y, n);
                    const double w1 = p1[k];
                    const double dw1 = d1[k];
                    if (w1 == 0.0 && dw1 == 0.0) continue;
                    const double diff = uix - vj[y];
                    st += w1 * std::abs(diff);
                    const double sg = sgn(vj[y] - uix);
                    if (sg != 0.0) {
                        // grad_y phi1(x - y) = -phi1'(x - y)
                        sfl += -dw1 * Vv[j][y] * sg * (fv[j][y] - fux);
                        sdv += w1 * fux * sg * divVv[j][y];
                    }
                }
            }
            acc += wij * (dphi2_s * st + phi2 * sfl - phi2 * sdv);
        }
        partial[i] = acc * vol2;
    }
    double rest = 0.0;
    for (int i = 0; i < M; ++i) rest += partial[i];
    return t1 + t2 + rest;
}

double time_modulus(std::span<const State> trajectory, double lag) {
    const double dt = check_uniform_times(trajectory, "time modulus");
    if (!(lag > 0.0)) throw resolution_error("lag must be positive");
    const long k = std::lround(lag / dt);
    if (k < 1 || std::abs(k * dt - lag) > 1e-9 * std::max(dt, lag))
        throw resolution_error("lag must be a multiple of the snapshot spacing");
    if (static_cast<std::size_t>(k) >= trajectory.size())
        throw resolution_error("lag beyond the trajectory span");
    double worst = 0.0;
    for (std::size_t i = 0; i + k < trajectory.size(); ++i)
        worst = std::max(worst, distance_l1(trajectory[i + k].u, trajectory[i].u));
    return worst;
}

}  // namespace nlclaw
