#include "nlclaw/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nlclaw/fft.hpp"
#include "nlclaw/field_ops.hpp"
#include "nlclaw/kernels.hpp"

namespace nlclaw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StageData {
    std::vector<double> f, fp;
    ForceEval force;
};

struct Scratch {
    StageData s1, s2;
    std::vector<double> flux_x, flux_y, u1, u2;

    void resize(std::size_t n, int dim) {
        for (StageData* s : {&s1, &s2}) {
            s->f.resize(n);
            s->fp.resize(n);
        }
        flux_x.resize(n);
        if (dim == 2) flux_y.resize(n);
        u1.resize(n);
        u2.resize(n);
    }
};

void prepare(const Problem& p, const Field& u, StageData& sd) {
    p.mobility.eval_arrays(u.values, sd.f, sd.fp);
    sd.force = convolve(p.kernel, u);
}

/// sum over axes of max|f'(u) V_a| plus max|f(u)| * h * |div V| (speed units).
double advective_speed(const Problem& p, const StageData& sd) {
    const Grid& g = p.grid;
    double total = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        double m = 0.0;
        const auto& v = sd.force.force.comp[a];
        for (std::size_t i = 0; i < v.size(); ++i) {
            double s = std::abs(sd.fp[i] * v[i]);
            if (s > m || s != s) m = s;
        }
        total += m;
    }
    double msrc = 0.0;
    const auto& dv = sd.force.div_force.values;
    for (std::size_t i = 0; i < dv.size(); ++i) {
        double s = std::abs(sd.f[i] * dv[i]);
        if (s > msrc || s != s) msrc = s;
    }
    return total + g.spacing() * msrc;
}

double dt_bound(const Problem& p, const StageData& sd) {
    const Grid& g = p.grid;
    const double h = g.spacing();
    double s = advective_speed(p, sd);
    double dt_adv = s > 0.0 ? p.cfl_advection * h / s : kInf;
    double dt_diff =
        p.epsilon > 0.0 ? p.cfl_diffusion * h * h / (2.0 * g.dim * p.epsilon) : kInf;
    return std::min(dt_adv, dt_diff);
}

void euler_stage(const Problem& p, std::span<const double> u, const StageData& sd,
                 double dt, Scratch& sc, std::span<double> out) {
    const Grid& g = p.grid;
    const int n = g.n;
    const double h = g.spacing();
    kernels::llf_interface_flux(u, sd.f, sd.fp, sd.force.force.comp[0], n, g.dim, 0,
                                sc.flux_x);
    if (g.dim == 2)
        kernels::llf_interface_flux(u, sd.f, sd.fp, sd.force.force.comp[1], n, g.dim, 1,
                                    sc.flux_y);
    kernels::conservative_update(u, sc.flux_x, sc.flux_y, n, g.dim, dt / h,
                                 p.epsilon * dt / (h * h), out);
}

bool exceeds_threshold(std::span<const double> u, double threshold) {
    double m = kernels::max_abs(u);
    return !(m <= threshold);  // catches NaN as well
}

/// Max positive Kruzhkov residual of the step at a set of levels, using the
/// scheme's own companion entropy flux (same dissipation coefficient).
double step_entropy_residual(const Problem& p, std::span<const double> u_old,
                             std::span<const double> u_new, const StageData& sd,
                             double dt, std::span<const double> levels) {
    const Grid& g = p.grid;
    const int n = g.n;
    const double h = g.spacing();
    const std::size_t cells = u_old.size();
    std::vector<double> eta(cells), q(cells), qx(cells), qy(g.dim == 2 ? cells : 0);
    double worst = 0.0;
    for (double k : levels) {
        double fk;
        try {
            fk = p.mobility(k);
        } catch (const std::domain_error&) {
            continue;
        }
        for (std::size_t i = 0; i < cells; ++i) {
            double d = u_old[i] - k;
            double sg = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            eta[i] = std::abs(d);
            q[i] = sg * (sd.f[i] - fk);
        }
        kernels::llf_interface_flux(eta, q, sd.fp, sd.force.force.comp[0], n, g.dim, 0, qx);
        if (g.dim == 2)
            kernels::llf_interface_flux(eta, q, sd.fp, sd.force.force.comp[1], n, g.dim, 1,
                                        qy);
        const auto& dv = sd.force.div_force.values;
        for (std::size_t i = 0; i < cells; ++i) {
            int ix = int(i % std::size_t(n));
            int iy = int(i / std::size_t(n));
            int ixm = (ix == 0) ? n - 1 : ix - 1;
            double divq = (qx[i] - qx[g.dim == 1 ? std::size_t(ixm)
                                                 : g.index(ixm, iy)]) /
                          h;
            if (g.dim == 2) {
                int iym = (iy == 0) ? n - 1 : iy - 1;
                divq += (qy[i] - qy[g.index(ix, iym)]) / h;
            }
            double d = u_old[i] - k;
            double sg = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            double eta_new = std::abs(u_new[i] - k);
            double r = (eta_new - eta[i]) / dt + divq + (sg * sd.f[i] - q[i]) * dv[i];
            if (r > worst) worst = r;
        }
    }
    return worst;
}

std::vector<double> monitor_levels(const Field& u0) {
    double lo = kInf, hi = -kInf;
    for (double v : u0.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<double> levels(5);
    for (int j = 0; j < 5; ++j) levels[j] = lo + (j + 0.5) / 5.0 * (hi - lo);
    return levels;
}

bool support_check(const Problem& p, const Field& u) {
    if (p.support_fraction >= 1.0) return true;
    const Grid& g = p.grid;
    const double half = 0.5 * p.support_fraction * g.length;
    for (int iy = 0; iy < (g.dim == 2 ? g.n : 1); ++iy) {
        for (int ix = 0; ix < g.n; ++ix) {
            bool inside = std::abs(g.center(ix)) <= half;
            if (g.dim == 2) inside = inside && std::abs(g.center(iy)) <= half;
            if (inside) continue;
            if (std::abs(u.values[g.index(ix, iy)]) >= 1e-10) return false;
        }
    }
    return true;
}

}  // namespace

void validate_problem(const Problem& p) {
    if (!(p.grid == p.u0.grid) || !(p.grid == p.kernel.grid()))
        throw shape_error("problem: u0, kernel, and grid must agree");
    if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon))
        throw unsupported_error("problem: epsilon must be finite and >= 0");
    if (!(p.horizon >= 0.0) || !std::isfinite(p.horizon))
        throw unsupported_error("problem: horizon must be finite and >= 0");
    for (double c : {p.cfl_advection, p.cfl_diffusion})
        if (!(c > 0.0) || !(c <= 1.0))
            throw unsupported_error("problem: CFL numbers must lie in (0, 1]");
    if (!(p.blowup_threshold > 0.0))
        throw unsupported_error("problem: blowup threshold must be positive");
    if (!(p.support_fraction > 0.0) || !(p.support_fraction <= 1.0))
        throw unsupported_error("problem: support fraction must lie in (0, 1]");
    if (!all_finite(p.u0)) throw invalid_field_error("problem: u0 has non-finite values");
    if (p.mobility.kind() == Mobility::Kind::power)
        for (double v : p.u0.values)
            if (v < 0.0)
                throw unsupported_error(
                    "problem: power mobility requires nonnegative initial data");
}

double cfl_dt(const State& s, const Problem& p) {
    validate_problem(p);
    StageData sd;
    sd.f.resize(s.u.size());
    sd.fp.resize(s.u.size());
    prepare(p, s.u, sd);
    return dt_bound(p, sd);
}

State step(const State& s, const Problem& p, double dt) {
    validate_problem(p);
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw unsupported_error("step: dt must be positive and finite");
    Scratch sc;
    sc.resize(s.u.size(), p.grid.dim);
    prepare(p, s.u, sc.s1);
    euler_stage(p, s.u.values, sc.s1, dt, sc, sc.u1);

    Field u1(p.grid, sc.u1);
    prepare(p, u1, sc.s2);
    euler_stage(p, sc.u1, sc.s2, dt, sc, sc.u2);

    State out;
    out.time = s.time + dt;
    out.step_count = s.step_count + 1;
    out.u = Field(p.grid);
    kernels::half_sum(s.u.values, sc.u2, out.u.values);
    out.blown_up = exceeds_threshold(out.u.values, p.blowup_threshold);
    return out;
}

RunResult run(const Problem& p, std::span<const double> output_times) {
    validate_problem(p);
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < 0.0 || output_times[i] > p.horizon)
            throw unsupported_error("run: output times must lie in [0, horizon]");
        if (i > 0 && !(output_times[i] > output_times[i - 1]))
            throw unsupported_error("run: output times must be strictly increasing");
    }

    RunResult result;
    State current{0.0, p.u0, 0, false};

    if (p.horizon == 0.0 || output_times.empty()) {
        result.snapshots.push_back(current);
        result.support_ok = support_check(p, current.u);
        return result;
    }

    std::vector<double> levels = monitor_levels(p.u0);
    Scratch sc;
    sc.resize(p.u0.size(), p.grid.dim);

    std::size_t next_out = 0;
    if (output_times[0] == 0.0) {
        result.snapshots.push_back(current);
        result.support_ok = result.support_ok && support_check(p, current.u);
        ++next_out;
    }

    const double t_end = p.horizon;
    while (current.time < t_end) {
        prepare(p, current.u, sc.s1);
        double dt = dt_bound(p, sc.s1);
        bool landed_output = false;
        if (next_out < output_times.size() &&
            output_times[next_out] - current.time <= dt) {
            dt = output_times[next_out] - current.time;
            landed_output = true;
        } else if (t_end - current.time <= dt) {
            dt = t_end - current.time;
        }
        if (!(dt > 0.0)) break;

        euler_stage(p, current.u.values, sc.s1, dt, sc, sc.u1);
        Field u1(p.grid, sc.u1);
        prepare(p, u1, sc.s2);
        euler_stage(p, sc.u1, sc.s2, dt, sc, sc.u2);

        State next;
        next.time = landed_output ? output_times[next_out] : current.time + dt;
        next.step_count = current.step_count + 1;
        next.u = Field(p.grid);
        kernels::half_sum(current.u.values, sc.u2, next.u.values);
        next.blown_up = exceeds_threshold(next.u.values, p.blowup_threshold);

        double force_linf = vector_norm_linf(sc.s1.force.force);
        double residual = next.blown_up
                              ? std::numeric_limits<double>::quiet_NaN()
                              : step_entropy_residual(p, current.u.values, next.u.values,
                                                      sc.s1, dt, levels);
        result.diagnostics.push_back(DiagnosticsRow{
            next.time, dt, p.grid.cell_volume() * kernels::sum(next.u.values),
            p.grid.cell_volume() * kernels::abs_sum(next.u.values),
            kernels::max_abs(next.u.values),
            [&] {
                double w = p.grid.dim == 1 ? 1.0 : p.grid.spacing();
                double s = 0.0;
                for (int a = 0; a < p.grid.dim; ++a)
                    s += kernels::tv_axis(next.u.values, p.grid.n, p.grid.dim, a);
                return w * s;
            }(),
            residual, force_linf, next.blown_up});

        current = std::move(next);
        if (current.blown_up) {
            result.snapshots.push_back(current);
            return result;
        }
        if (landed_output) {
            result.snapshots.push_back(current);
            result.support_ok = result.support_ok && support_check(p, current.u);
            ++next_out;
        }
    }
    return result;
}

PicardResult picard_iterate(const Problem& p, double t_short, int iterations,
                            int substeps) {
    validate_problem(p);
    if (!(p.epsilon > 0.0))
        throw unsupported_error("picard: requires strictly positive viscosity");
    if (!(t_short > 0.0) || !std::isfinite(t_short))
        throw unsupported_error("picard: horizon must be positive and finite");
    if (iterations < 1 || substeps < 1)
        throw unsupported_error("picard: iterations and substeps must be positive");

    using cd = std::complex<double>;
    const Grid& g = p.grid;
    const std::size_t ns = spectrum_size(g);
    const std::size_t cells = g.cell_count();
    const double tau = t_short / substeps;
    const double vol = g.cell_volume();

    std::vector<double> heat(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        double xi_sq = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double x = spectral_xi(g, s, a);
            xi_sq += x * x;
        }
        heat[s] = std::exp(-p.epsilon * xi_sq * tau);
    }

    std::vector<cd> u0hat(ns);
    fft_forward(g, p.u0.values, u0hat);

    const int m_nodes = substeps + 1;
    std::vector<std::vector<double>> v_old(m_nodes, p.u0.values);
    std::vector<std::vector<double>> v_new(m_nodes, p.u0.values);

    auto x_distance = [&](const std::vector<std::vector<double>>& a,
                          const std::vector<std::vector<double>>& b) {
        double worst = 0.0;
        for (int m = 0; m < m_nodes; ++m) {
            double l1 = vol * kernels::abs_diff_sum(a[m], b[m]);
            double li = kernels::max_abs_diff(a[m], b[m]);
            worst = std::max(worst, std::max(l1, li));
        }
        return worst;
    };

    PicardResult result;
    {
        double r = 2.0 * std::max(norm_l1(p.u0), norm_linf(p.u0));
        Mobility::Bounds b = p.mobility.bounds(2.0 * r);
        double denom = p.kernel.stats().l1_norm * (r * b.sup_fprime + b.sup_f);
        result.threshold = denom > 0.0 ? p.epsilon / (4.0 * denom * denom) : kInf;
    }

    std::vector<double> f(cells), fp(cells), gval(cells);
    std::vector<cd> a_hat(ns), g_hat(ns), w_hat(ns);
    std::vector<double> distances;

    for (int it = 1; it <= iterations; ++it) {
        a_hat = u0hat;
        v_new[0] = p.u0.values;
        for (int m = 1; m < m_nodes; ++m) {
            Field vm(g, v_old[m]);
            p.mobility.eval_arrays(vm.values, f, fp);
            ForceEval fe = convolve(p.kernel, vm);
            std::fill(g_hat.begin(), g_hat.end(), cd(0.0, 0.0));
            for (int a = 0; a < g.dim; ++a) {
                for (std::size_t i = 0; i < cells; ++i)
                    gval[i] = f[i] * fe.force.comp[a][i];
                fft_forward(g, gval, w_hat);
                for (std::size_t s = 0; s < ns; ++s)
                    g_hat[s] += cd(0.0, spectral_xi(g, s, a)) * w_hat[s];
            }
            for (std::size_t s = 0; s < ns; ++s)
                a_hat[s] = heat[s] * a_hat[s] - tau * g_hat[s];
            fft_inverse(g, a_hat, v_new[m]);
        }
        distances.push_back(x_distance(v_new, v_old));
        std::swap(v_old, v_new);
    }

    for (std::size_t i = 1; i < distances.size(); ++i)
        result.contraction_factors.push_back(
            distances[i - 1] > 0.0 ? distances[i] / distances[i - 1] : 0.0);

    int over = 0;
    for (double fct : result.contraction_factors) {
        over = fct > 1.0 ? over + 1 : 0;
        if (over >= 3) {
            result.contractive = false;
            break;
        }
    }

    result.terminal = Field(g);
    result.terminal.values = v_old[m_nodes - 1];
    return result;
}

std::optional<BlowupReport> detect_blowup(const DiagnosticsSeries& d, const Problem& p) {
    for (const auto& row : d)
        if (row.blown_up || !(row.linf <= p.blowup_threshold))
            return BlowupReport{row.t, row.linf};
    return std::nullopt;
}

Field heat_evolve(const Field& f, double epsilon, double t) {
    if (!(epsilon >= 0.0) || !(t >= 0.0))
        throw unsupported_error("heat_evolve: epsilon and t must be >= 0");
    const Grid& g = f.grid;
    std::vector<std::complex<double>> hat(spectrum_size(g));
    fft_forward(g, f.values, hat);
    for (std::size_t s = 0; s < hat.size(); ++s) {
        double xi_sq = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double x = spectral_xi(g, s, a);
            xi_sq += x * x;
        }
        hat[s] *= std::exp(-epsilon * xi_sq * t);
    }
    Field out(g);
    fft_inverse(g, hat, out.values);
    return out;
}

void write_diagnostics_csv(const std::string& path, const DiagnosticsSeries& d) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw error("write_diagnostics_csv: cannot open " + path);
    std::fputs("t,dt,mass,l1,linf,tv,entropy_residual_max,force_linf,blown_up\n", fp);
    for (const auto& r : d)
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.t,
                     r.dt, r.mass, r.l1, r.linf, r.tv, r.entropy_residual_max,
                     r.force_linf, int(r.blown_up));
    std::fclose(fp);
}

}  // namespace nlclaw
