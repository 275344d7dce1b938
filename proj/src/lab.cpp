#include "nlclaw/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlclaw/field_ops.hpp"

namespace nlclaw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OdeKnot {
    double t, y, f;
};

double ode_rhs(double y, double alpha, double c) {
    return c * y * (1.0 + std::pow(y, alpha));
}

double rk4_step(double y, double dt, double alpha, double c) {
    const double k1 = ode_rhs(y, alpha, c);
    const double k2 = ode_rhs(y + 0.5 * dt * k1, alpha, c);
    const double k3 = ode_rhs(y + 0.5 * dt * k2, alpha, c);
    const double k4 = ode_rhs(y + dt * k3, alpha, c);
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double hermite(const OdeKnot& a, const OdeKnot& b, double t) {
    const double dt = b.t - a.t;
    if (dt <= 0.0) return a.y;
    const double s = (t - a.t) / dt;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * a.y + h10 * dt * a.f + h01 * b.y + h11 * dt * b.f;
}

double eval_dense(const std::vector<OdeKnot>& knots, double t) {
    if (t <= knots.front().t) return knots.front().y;
    if (t >= knots.back().t) return knots.back().y;
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double v, const OdeKnot& k) { return v < k.t; });
    return hermite(*(it - 1), *it, t);
}

double interp_linear(std::span<const double> xs, std::span<const double> ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - w) * ys[j - 1] + w * ys[j];
}

double tv_growth_rate(const Problem& p, double M, TvBoundTerms terms) {
    const KernelStats& st = p.kernel.stats();
    const Mobility::Bounds b = p.mobility.bounds(M);
    double g = 0.0;
    if (terms != TvBoundTerms::gradient) g += b.sup_f * st.div_tv;
    if (terms != TvBoundTerms::divergence) g += b.sup_fprime * st.tv * M;
    return g;
}

// A(t) by trapezoid over the bound-curve knots plus a partial last interval.
double tv_exponent_at(const Problem& p, const BoundCurve& linf, double t,
                      TvBoundTerms terms) {
    double a = 0.0;
    for (std::size_t j = 0; j + 1 < linf.times.size(); ++j) {
        const double t0 = linf.times[j], t1 = linf.times[j + 1];
        const double g0 = tv_growth_rate(p, linf.values[j], terms);
        if (t >= t1) {
            const double g1 = tv_growth_rate(p, linf.values[j + 1], terms);
            a += 0.5 * (g0 + g1) * (t1 - t0);
        } else if (t > t0) {
            const double m = interp_linear(linf.times, linf.values, t);
            a += 0.5 * (g0 + tv_growth_rate(p, m, terms)) * (t - t0);
            break;
        } else {
            break;
        }
    }
    return a;
}

double linear_fit_slope(std::span<const double> xs, std::span<const double> ys,
                        double& intercept, double& r2) {
    const std::size_t n = xs.size();
    double xb = 0.0, yb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xb += xs[i];
        yb += ys[i];
    }
    xb /= static_cast<double>(n);
    yb /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xb) * (xs[i] - xb);
        sxy += (xs[i] - xb) * (ys[i] - yb);
        syy += (ys[i] - yb) * (ys[i] - yb);
    }
    const double slope = sxy / sxx;
    intercept = yb - slope * xb;
    double ssres = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (intercept + slope * xs[i]);
        ssres += e * e;
    }
    r2 = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
    return slope;
}

double linfty_ode_alpha(const Mobility& m) {
    return std::max(0.0, m.growth_exponent() - 1.0);
}

double sup_distance(const std::vector<State>& a, const std::vector<State>& b) {
    double worst = 0.0;
    const std::size_t m = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < m; ++i)
        worst = std::max(worst, distance_l1(a[i].u, b[i].u));
    return worst;
}

RateStudy rate_study_impl(const Problem& p, std::span<const double> epsilons,
                          double T, const std::vector<State>* external_ref,
                          double ref_epsilon, double ode_constant) {
    validate_problem(p);
    if (epsilons.size() < 4) throw error("rate study needs at least 4 viscosities");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i]))
            throw error("viscosities must be positive and finite");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw error("viscosities must be strictly decreasing");
    }
    if (!(T > 0.0)) throw error("study horizon must be positive");

    const double alpha = linfty_ode_alpha(p.mobility);
    const std::vector<double> span_times{0.0, T};
    const LinftyCurve guard = linfty_bound_curve(
        norm_linf(p.u0), alpha, ode_constant * p.kernel.stats().div_tv, span_times);
    if (!(T < guard.doubling_time))
        throw error("study horizon reaches the L-infinity bound doubling time");

    const std::vector<double> times = study_times(T);

    RateStudy out;
    out.epsilons.assign(epsilons.begin(), epsilons.end());

    std::vector<State> ref;
    if (external_ref != nullptr) {
        if (external_ref->size() != times.size())
            throw shape_error("external reference must sit on the study output times");
        for (std::size_t i = 0; i < times.size(); ++i) {
            require_same_grid(p.grid, (*external_ref)[i].u.grid, "reference snapshots");
            if (std::abs((*external_ref)[i].time - times[i]) > 1e-9 * std::max(1.0, T))
                throw shape_error("external reference must sit on the study output times");
        }
        ref = *external_ref;
        out.ref_epsilon = ref_epsilon;
    } else {
        out.ref_epsilon = epsilons.back() / 16.0;
        Problem pr = p;
        pr.epsilon = out.ref_epsilon;
        pr.horizon = T;
        RunResult rr = run(pr, times);
        if (!rr.snapshots.empty() && rr.snapshots.back().blown_up) {
            out.aborted = true;
            out.abort_reason = "reference run blew up at t=" +
                               std::to_string(rr.snapshots.back().time);
            return out;
        }
        ref = std::move(rr.snapshots);
    }

    for (double eps : epsilons) {
        Problem pe = p;
        pe.epsilon = eps;
        pe.horizon = T;
        RunResult rr = run(pe, times);
        if (!rr.snapshots.empty() && rr.snapshots.back().blown_up) {
            out.aborted = true;
            out.abort_reason = "run at epsilon=" + std::to_string(eps) +
                               " blew up at t=" + std::to_string(rr.snapshots.back().time);
            return out;
        }
        const double d = sup_distance(rr.snapshots, ref);
        if (!(d > 0.0))
            throw error("degenerate rate study: zero distance to the reference");
        out.distances.push_back(d);
    }

    std::vector<double> xs(out.distances.size()), ys(out.distances.size());
    for (std::size_t i = 0; i < out.distances.size(); ++i) {
        xs[i] = std::log(out.epsilons[i]);
        ys[i] = std::log(out.distances[i]);
    }
    double intercept = 0.0;
    out.fitted_slope = linear_fit_slope(xs, ys, intercept, out.r_squared);
    out.fitted_constant = std::exp(intercept);
    return out;
}

}  // namespace

LinftyCurve linfty_bound_curve(double u0_linf, double alpha, double c_times_divtv,
                               std::span<const double> times) {
    if (!(u0_linf >= 0.0) || !std::isfinite(u0_linf))
        throw error("initial bound must be nonnegative and finite");
    if (!(alpha >= 0.0) || !(c_times_divtv >= 0.0))
        throw error("bound ODE coefficients must be nonnegative");
    if (times.empty()) throw error("bound curve needs at least one time");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw error("bound curve times must be nonnegative");
        if (i > 0 && !(times[i] >= times[i - 1]))
            throw error("bound curve times must be nondecreasing");
    }

    LinftyCurve out;
    out.curve.kind = BoundCurve::Kind::linfty;
    const double t_end = times.back();

    if (c_times_divtv == 0.0 || u0_linf == 0.0) {
        out.curve.times.assign(times.begin(), times.end());
        out.curve.values.assign(times.size(), u0_linf);
        out.doubling_time = kInf;
        return out;
    }

    std::vector<OdeKnot> knots{{0.0, u0_linf, ode_rhs(u0_linf, alpha, c_times_divtv)}};
    const double tol = 1e-10;
    const double y_cap = 1e12;
    double t = 0.0, y = u0_linf;
    double dt = t_end > 0.0 ? t_end / 64.0 : 1.0;
    bool blew = false;
    while (t < t_end) {
        dt = std::min(dt, t_end - t);
        const double y1 = rk4_step(y, dt, alpha, c_times_divtv);
        const double yh = rk4_step(rk4_step(y, 0.5 * dt, alpha, c_times_divtv),
                                   0.5 * dt, alpha, c_times_divtv);
        const double err = std::abs(yh - y1);
        const double scale = tol * std::max(1.0, std::abs(yh));
        if (!std::isfinite(yh) || yh > y_cap) {
            dt *= 0.5;
            if (dt < 1e-15 * std::max(1.0, t)) {
                blew = true;
                break;
            }
            continue;
        }
        if (err <= scale) {
            t += dt;
            y = yh + (yh - y1) / 15.0;
            knots.push_back({t, y, ode_rhs(y, alpha, c_times_divtv)});
            if (y > y_cap) {
                blew = true;
                break;
            }
        }
        const double grow = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 4.0;
        dt *= std::clamp(grow, 0.25, 4.0);
        if (dt < 1e-15 * std::max(1.0, t)) {
            blew = true;
            break;
        }
    }

    out.curve.truncated = blew;
    out.curve.blowup_time = blew ? knots.back().t : 0.0;
    for (double tq : times) {
        if (blew && tq >= knots.back().t && tq > 0.0) break;
        out.curve.times.push_back(tq);
        out.curve.values.push_back(eval_dense(knots, tq));
    }
    if (out.curve.times.empty()) {
        out.curve.times.push_back(0.0);
        out.curve.values.push_back(u0_linf);
    }

    const double target = 2.0 * u0_linf;
    out.doubling_time = kInf;
    for (std::size_t j = 1; j < knots.size(); ++j) {
        if (knots[j].y >= target) {
            double lo = knots[j - 1].t, hi = knots[j].t;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (eval_dense(knots, mid) >= target)
                    hi = mid;
                else
                    lo = mid;
                if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
            }
            out.doubling_time = 0.5 * (lo + hi);
            break;
        }
    }
    return out;
}

BoundCurve tv_bound_curve(const Problem& p, const BoundCurve& linf_curve,
                          std::span<const double> times, TvBoundTerms terms) {
    if (linf_curve.kind != BoundCurve::Kind::linfty)
        throw error("tv bound needs an L-infinity curve");
    if (linf_curve.times.empty()) throw error("empty bound curve");
    if (times.empty()) throw error("tv bound needs at least one time");
    for (double t : times)
        if (t < linf_curve.times.front() - 1e-12 || t > linf_curve.times.back() + 1e-12)
            throw resolution_error("bound curve does not cover the requested times");

    BoundCurve out;
    out.kind = BoundCurve::Kind::tv;
    const double tv0 = total_variation(p.u0);
    for (double t : times) {
        const double a = tv_exponent_at(p, linf_curve, t, terms);
        out.times.push_back(t);
        out.values.push_back(std::exp(a) * tv0);
    }
    return out;
}

std::vector<double> study_times(double T, int count) {
    if (!(T > 0.0)) throw error("study horizon must be positive");
    if (count < 2) throw error("study needs at least 2 output times");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = T * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

RateStudy rate_study(const Problem& p, std::span<const double> epsilons, double T,
                     double ode_constant) {
    return rate_study_impl(p, epsilons, T, nullptr, 0.0, ode_constant);
}

RateStudy rate_study(const Problem& p, std::span<const double> epsilons, double T,
                     std::span<const State> external_reference, double ref_epsilon,
                     double ode_constant) {
    const std::vector<State> ref(external_reference.begin(), external_reference.end());
    return rate_study_impl(p, epsilons, T, &ref, ref_epsilon, ode_constant);
}

std::vector<NamedPerturbation> standard_perturbations(const Field& u0) {
    const double target = 0.05 * norm_l1(u0);
    std::vector<NamedPerturbation> out;

    const auto scaled = [&](const char* name, Field delta) {
        const double l1 = norm_l1(delta);
        if (l1 > target && l1 > 0.0) {
            const double s = target / l1;
            for (double& v : delta.values) v *= s;
        }
        out.push_back({name, std::move(delta)});
    };

    Field shift = cyclic_shift(u0, 1);
    for (std::size_t i = 0; i < shift.size(); ++i) shift.values[i] -= u0.values[i];
    scaled("shift", std::move(shift));

    Field amp = u0;
    for (double& v : amp.values) v *= 0.05;
    scaled("amplitude", std::move(amp));

    const Grid& g = u0.grid;
    Field bump(g);
    const double w = g.length / 12.0;
    for (std::size_t i = 0; i < bump.size(); ++i) {
        const int ix = static_cast<int>(i) % g.n;
        double r2 = (g.center(ix) + 0.25 * g.length) * (g.center(ix) + 0.25 * g.length);
        if (g.dim == 2) {
            const double y = g.center(static_cast<int>(i) / g.n) + 0.25 * g.length;
            r2 += y * y;
        }
        bump.values[i] = std::exp(-r2 / (2.0 * w * w));
    }
    const double bl1 = norm_l1(bump);
    if (bl1 > 0.0 && target > 0.0)
        for (double& v : bump.values) v *= target / bl1;
    else
        for (double& v : bump.values) v = 0.0;
    scaled("bump", std::move(bump));

    return out;
}

StabilityStudy stability_study(const Problem& p,
                               std::span<const NamedPerturbation> perturbations,
                               double T, double ode_constant) {
    validate_problem(p);
    if (!(T > 0.0)) throw error("study horizon must be positive");
    const std::vector<double> times = study_times(T);
    const double u0_l1 = norm_l1(p.u0);

    Problem pb = p;
    pb.horizon = T;
    RunResult base = run(pb, times);
    if (!base.snapshots.empty() && base.snapshots.back().blown_up)
        throw error("base run blew up at t=" + std::to_string(base.snapshots.back().time));

    StabilityStudy out;
    double m0 = norm_linf(p.u0);
    double tv0 = total_variation(p.u0);

    for (const NamedPerturbation& pert : perturbations) {
        require_same_grid(p.grid, pert.delta.grid, "perturbations");
        StabilityRow row;
        row.name = pert.name;
        const double dl1 = norm_l1(pert.delta);
        if (dl1 == 0.0) {
            row.skipped = true;
            row.note = "zero perturbation";
            out.rows.push_back(std::move(row));
            continue;
        }
        if (dl1 > 0.1 * u0_l1 + 1e-300)
            throw error("perturbation '" + pert.name + "' exceeds 10% of |u0|_L1");

        Field v0 = p.u0;
        for (std::size_t i = 0; i < v0.size(); ++i) v0.values[i] += pert.delta.values[i];
        m0 = std::max(m0, norm_linf(v0));
        tv0 = std::max(tv0, total_variation(v0));

        Problem pv = p;
        pv.u0 = std::move(v0);
        pv.horizon = T;
        RunResult vr = run(pv, times);
        if (!vr.snapshots.empty() && vr.snapshots.back().blown_up) {
            row.skipped = true;
            row.note = "perturbed run blew up at t=" +
                       std::to_string(vr.snapshots.back().time);
            out.rows.push_back(std::move(row));
            continue;
        }

        row.initial_distance = distance_l1(base.snapshots.front().u, vr.snapshots.front().u);
        row.sup_distance = sup_distance(base.snapshots, vr.snapshots);
        row.ratio = row.sup_distance / row.initial_distance;
        out.rows.push_back(std::move(row));
    }

    const double alpha = linfty_ode_alpha(p.mobility);
    const KernelStats& st = p.kernel.stats();
    const LinftyCurve lc = linfty_bound_curve(m0, alpha, ode_constant * st.div_tv, times);
    if (lc.curve.truncated || lc.curve.times.back() < T) {
        out.prediction = kInf;
    } else {
        const double m_T = lc.curve.values.back();
        const double tvb = std::exp(tv_exponent_at(p, lc.curve, T, TvBoundTerms::full)) * tv0;
        const Mobility::Bounds b = p.mobility.bounds(m_T);
        out.prediction =
            std::exp(T * (tvb * b.sup_fprime * st.linf_norm + b.sup_f * st.div_tv));
    }

    for (const StabilityRow& row : out.rows)
        if (!row.skipped && !(row.ratio <= out.prediction)) out.all_within_bound = false;
    return out;
}

Problem preset_hks(int n, double epsilon, double T, const U0Spec& u0) {
    Grid g = make_grid(1, n, 1.0);
    Field u = build_u0(g, u0);
    for (double v : u.values)
        if (!(v >= 0.0) || !(v <= 1.0))
            throw invalid_field_error("smoothing-kernel preset needs u0 in [0, 1]");
    Problem p{g, std::move(u), InteractionKernel::hks(g), Mobility::logistic(),
              epsilon, T};
    p.support_fraction = 1.0;
    validate_problem(p);
    return p;
}

Problem preset_cgv(int n, double m_exponent, double epsilon, double T,
                   const U0Spec& u0) {
    Grid g = make_grid(1, n, 1.0);
    Field u = build_u0(g, u0);
    for (double v : u.values)
        if (!(v > 0.0))
            throw invalid_field_error("Coulomb-gradient preset needs strictly positive u0");
    Problem p{g, std::move(u), InteractionKernel::cgv(g), Mobility::power(m_exponent),
              epsilon, T};
    p.support_fraction = 1.0;
    validate_problem(p);
    return p;
}

}  // namespace nlclaw
