#include "nlclaw/execute.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "nlclaw/field_ops.hpp"
#include "nlclaw/initial_data.hpp"
#include "nlclaw/lab.hpp"
#include "nlclaw/snapshot.hpp"
#include "nlclaw/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace nlclaw {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> uniform_times(double T, int count) {
    return study_times(T, count);
}

/// Collects output files so the manifest can list every artifact.
struct Artifacts {
    fs::path dir;
    std::vector<std::string> names;

    std::ofstream open(const std::string& name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw error("cannot write '" + (dir / name).string() + "'");
        names.push_back(name);
        return out;
    }
    std::string path_for(const std::string& name) {
        names.push_back(name);
        return (dir / name).string();
    }
};

void write_two_column(Artifacts& art, const std::string& name,
                      std::span<const double> x, std::span<const double> y) {
    std::ofstream out = art.open(name);
    const std::size_t m = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < m; ++i)
        out << fmt(x[i]) << " " << fmt(y[i]) << "\n";
}

int cmd_run(const RunConfig& cfg, Artifacts& art, json& notes) {
    Problem p = make_problem(cfg);
    const std::vector<double> times = cfg.output.times.empty()
        ? uniform_times(p.horizon, cfg.output.count)
        : cfg.output.times;
    const RunResult rr = run(p, times);
    write_diagnostics_csv(art.path_for("diagnostics.csv"), rr.diagnostics);
    if (cfg.output.write_snapshots) {
        for (std::size_t i = 0; i < rr.snapshots.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "u_%04zu.snap", i);
            write_snapshot(art.path_for(name), rr.snapshots[i].u);
        }
    }
    notes["support_ok"] = rr.support_ok;
    const auto blow = detect_blowup(rr.diagnostics, p);
    if (blow) {
        notes["blowup_time"] = blow->time;
        return exit_blowup;
    }
    return exit_ok;
}

int cmd_rate_study(const RunConfig& cfg, Artifacts& art, json& notes) {
    Problem p = make_problem(cfg);
    const RateStudy rs = rate_study(p, cfg.rate.epsilons, cfg.rate.horizon,
                                    cfg.ode_constant);
    {
        std::ofstream out = art.open("rate_study.csv");
        out << "epsilon,distance,ref_epsilon\n";
        for (std::size_t i = 0; i < rs.distances.size(); ++i)
            out << fmt(rs.epsilons[i]) << "," << fmt(rs.distances[i]) << ","
                << fmt(rs.ref_epsilon) << "\n";
    }
    if (rs.aborted) {
        notes["aborted"] = true;
        notes["abort_reason"] = rs.abort_reason;
        return exit_blowup;
    }
    {
        std::ofstream out = art.open("rate_fit.txt");
        out << "slope " << fmt(rs.fitted_slope) << "\n"
            << "constant " << fmt(rs.fitted_constant) << "\n"
            << "r_squared " << fmt(rs.r_squared) << "\n";
    }
    notes["slope"] = rs.fitted_slope;
    return exit_ok;
}

int cmd_stability(const RunConfig& cfg, Artifacts& art, json& notes) {
    Problem p = make_problem(cfg);
    const auto perts = standard_perturbations(p.u0);
    const StabilityStudy ss =
        stability_study(p, perts, cfg.stability.horizon, cfg.ode_constant);
    std::ofstream out = art.open("stability.csv");
    out << "name,initial_distance,sup_distance,ratio,prediction,pass,note\n";
    for (const StabilityRow& r : ss.rows) {
        const bool pass = r.skipped || r.ratio <= ss.prediction;
        out << r.name << "," << fmt(r.initial_distance) << ","
            << fmt(r.sup_distance) << "," << fmt(r.ratio) << ","
            << fmt(ss.prediction) << "," << (pass ? 1 : 0) << "," << r.note
            << "\n";
    }
    notes["prediction"] = ss.prediction;
    return ss.all_within_bound ? exit_ok : exit_check_failure;
}

int cmd_verify_lemmas(const RunConfig& cfg, Artifacts& art, json& notes) {
    const Grid g = make_grid(1, cfg.lemmas.size, 1.0);
    std::ofstream out = art.open("lemmas.csv");
    out << "trial,lhs,rhs,margin,pass\n";
    int failures = 0;
    for (int t = 0; t < cfg.lemmas.trials; ++t) {
        const LemmaInstance inst = random_lemma_instance(g, cfg.seed + t);
        for (const LemmaCheck c : {check_lemma_a(inst), check_lemma_b(inst)}) {
            out << t << "," << fmt(c.lhs) << "," << fmt(c.rhs) << ","
                << fmt(c.rhs + c.slack - c.lhs) << "," << (c.pass ? 1 : 0)
                << "\n";
            failures += c.pass ? 0 : 1;
        }
    }
    notes["failures"] = failures;
    return failures == 0 ? exit_ok : exit_check_failure;
}

int cmd_kuznetsov(const RunConfig& cfg, Artifacts& art, json& notes) {
    Problem p = make_problem(cfg);
    p.horizon = cfg.kuznetsov.horizon;
    const std::vector<double> times =
        uniform_times(p.horizon, cfg.kuznetsov.snapshots);

    Problem entropy = p;
    entropy.epsilon = 0.0;
    Problem viscous = p;
    viscous.epsilon = cfg.kuznetsov.epsilon_viscous;

    const RunResult re = run(entropy, times);
    const RunResult rv = run(viscous, times);
    if (re.snapshots.back().blown_up || rv.snapshots.back().blown_up) {
        notes["blowup"] = true;
        return exit_blowup;
    }

    const double dt = times[1] - times[0];
    const MollifierPair m1 =
        make_mollifier_pair(p.grid, dt, cfg.kuznetsov.delta, cfg.kuznetsov.eta);
    const MollifierPair m2 = make_mollifier_pair(p.grid, dt, 2.0 * cfg.kuznetsov.delta,
                                                 cfg.kuznetsov.eta);

    const double d_entropy = kuznetsov_delta(re.snapshots, re.snapshots, p, m1);
    const double d_visc = kuznetsov_delta(re.snapshots, rv.snapshots, p, m1);
    const double d_visc2 = kuznetsov_delta(re.snapshots, rv.snapshots, p, m2);

    std::ofstream out = art.open("kuznetsov.csv");
    out << "case,delta,eta,value\n";
    out << "entropy," << fmt(m1.delta) << "," << fmt(m1.eta) << ","
        << fmt(d_entropy) << "\n";
    out << "viscous," << fmt(m1.delta) << "," << fmt(m1.eta) << "," << fmt(d_visc)
        << "\n";
    out << "viscous," << fmt(m2.delta) << "," << fmt(m2.eta) << "," << fmt(d_visc2)
        << "\n";

    // Scale for the entropy check: the L1 magnitude of the data the
    // functional integrates.
    const double scale = norm_l1(p.u0);
    const double neg1 = std::max(0.0, -d_visc);
    const double neg2 = std::max(0.0, -d_visc2);
    const double ratio = neg1 / std::max(neg2, 1e-300);
    notes["scale"] = scale;
    notes["negative_part_delta"] = neg1;
    notes["negative_part_2delta"] = neg2;
    notes["negative_part_ratio"] = ratio;

    const bool entropy_ok = d_entropy >= -0.05 * scale;
    const bool viscous_ok = ratio >= 1.5;
    notes["entropy_ok"] = entropy_ok;
    notes["viscous_ok"] = viscous_ok;
    return entropy_ok && viscous_ok ? exit_ok : exit_check_failure;
}

int cmd_bounds(const RunConfig& cfg, Artifacts& art, json& notes) {
    Problem p = make_problem(cfg);
    p.horizon = cfg.bounds.horizon;
    const std::vector<double> times = uniform_times(p.horizon, cfg.bounds.count);

    const double alpha = std::max(0.0, p.mobility.growth_exponent() - 1.0);
    const LinftyCurve lc = linfty_bound_curve(
        norm_linf(p.u0), alpha, cfg.ode_constant * p.kernel.stats().div_tv, times);
    TvBoundTerms terms = TvBoundTerms::full;
    if (cfg.tv_bound_uses == "divergence") terms = TvBoundTerms::divergence;
    if (cfg.tv_bound_uses == "gradient") terms = TvBoundTerms::gradient;
    const BoundCurve tc = tv_bound_curve(p, lc.curve, lc.curve.times, terms);

    const std::size_t m = lc.curve.times.size();
    const RunResult rr = run(p, std::span<const double>(times.data(), m));
    std::vector<double> t_meas, linf_meas, tv_meas;
    for (const State& s : rr.snapshots) {
        if (s.blown_up) break;
        t_meas.push_back(s.time);
        linf_meas.push_back(norm_linf(s.u));
        tv_meas.push_back(total_variation(s.u));
    }

    {
        std::ofstream out = art.open("bounds.csv");
        out << "t,linf,linf_bound,tv,tv_bound\n";
        for (std::size_t i = 0; i < t_meas.size() && i < m; ++i)
            out << fmt(t_meas[i]) << "," << fmt(linf_meas[i]) << ","
                << fmt(lc.curve.values[i]) << "," << fmt(tv_meas[i]) << ","
                << fmt(tc.values[i]) << "\n";
    }
    write_two_column(art, "linf_measured.txt", t_meas, linf_meas);
    write_two_column(art, "linf_bound.txt", lc.curve.times, lc.curve.values);
    write_two_column(art, "tv_measured.txt", t_meas, tv_meas);
    write_two_column(art, "tv_bound.txt", tc.times, tc.values);

    notes["doubling_time"] = lc.doubling_time;
    notes["bound_truncated"] = lc.curve.truncated;
    if (lc.curve.truncated) notes["bound_blowup_time"] = lc.curve.blowup_time;
    notes["tv_bound_uses"] = cfg.tv_bound_uses;
    notes["tv_bound_meaning"] =
        "exp(A(t)) * TV(u0) with A(t) the integrated growth rate of the "
        "selected terms along the L-infinity envelope";

    if (rr.snapshots.back().blown_up) {
        notes["blowup"] = true;
        return exit_blowup;
    }
    bool ok = true;
    for (std::size_t i = 0; i < t_meas.size() && i < m; ++i) {
        if (linf_meas[i] > 1.05 * lc.curve.values[i]) ok = false;
        if (tv_meas[i] > 1.1 * tc.values[i]) ok = false;
    }
    notes["within_bounds"] = ok;
    return ok ? exit_ok : exit_check_failure;
}

int cmd_picard(const RunConfig& cfg, Artifacts& art, json& notes) {
    Problem p = make_problem(cfg);
    const PicardResult pr = picard_iterate(p, cfg.picard.t_short,
                                           cfg.picard.iterations,
                                           cfg.picard.substeps);
    Problem pm = p;
    pm.horizon = cfg.picard.t_short;
    const double t_end[] = {cfg.picard.t_short};
    const RunResult rr = run(pm, t_end);

    std::ofstream out = art.open("picard.csv");
    out << "iteration,factor\n";
    for (std::size_t i = 0; i < pr.contraction_factors.size(); ++i)
        out << (i + 2) << "," << fmt(pr.contraction_factors[i]) << "\n";

    notes["threshold"] = pr.threshold;
    notes["t_short"] = cfg.picard.t_short;
    notes["below_threshold"] = cfg.picard.t_short <= pr.threshold;
    notes["contractive"] = pr.contractive;
    if (!rr.snapshots.back().blown_up)
        notes["l1_vs_march"] = distance_l1(pr.terminal, rr.snapshots.back().u);
    return exit_ok;
}

}  // namespace

std::vector<ConfigError> validate_for_command(const RunConfig& cfg) {
    std::vector<ConfigError> errs;
    const std::string& c = cfg.command;
    static const char* known[] = {"run",           "rate-study", "stability-study",
                                  "verify-lemmas", "kuznetsov",  "bounds",
                                  "picard"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return c == k; }) == std::end(known)) {
        errs.push_back({0, "command", "unknown command '" + c + "'"});
        return errs;
    }
    const bool needs_u0 = c != "verify-lemmas";
    if (needs_u0 && !cfg.has_u0)
        errs.push_back({0, "u0", "command '" + c + "' needs a [u0] section"});
    if (c == "rate-study" && cfg.rate.epsilons.size() < 4)
        errs.push_back({0, "rate_study.epsilons",
                        "rate study needs at least 4 strictly decreasing epsilons"});
    if (c == "kuznetsov") {
        if (cfg.preset.empty() && cfg.grid.dim != 1)
            errs.push_back({0, "grid.dim", "kuznetsov runs on 1-d grids"});
        if (cfg.grid.n > 128)
            errs.push_back({0, "grid.n", "kuznetsov caps the grid at n = 128"});
    }
    if (c == "picard" && !(cfg.problem.epsilon > 0.0))
        errs.push_back({0, "problem.epsilon",
                        "the mild-solution iterator needs epsilon > 0"});
    return errs;
}

Problem make_problem(const RunConfig& cfg) {
    if (cfg.preset == "hks") {
        Problem p = preset_hks(cfg.grid.n, cfg.problem.epsilon, cfg.problem.horizon,
                               cfg.u0);
        p.cfl_advection = cfg.problem.cfl_advection;
        p.cfl_diffusion = cfg.problem.cfl_diffusion;
        p.blowup_threshold = cfg.problem.blowup_threshold;
        return p;
    }
    if (cfg.preset == "cgv") {
        Problem p = preset_cgv(cfg.grid.n, cfg.mobility.m, cfg.problem.epsilon,
                               cfg.problem.horizon, cfg.u0);
        p.cfl_advection = cfg.problem.cfl_advection;
        p.cfl_diffusion = cfg.problem.cfl_diffusion;
        p.blowup_threshold = cfg.problem.blowup_threshold;
        return p;
    }

    const Grid g = make_grid(cfg.grid.dim, cfg.grid.n, cfg.grid.length);
    Field u0 = build_u0(g, cfg.u0);

    InteractionKernel kernel = [&] {
        switch (cfg.kernel.type) {
            case KernelSpec::Type::hks: return InteractionKernel::hks(g);
            case KernelSpec::Type::cgv: return InteractionKernel::cgv(g);
            case KernelSpec::Type::gaussian_gradient:
                return InteractionKernel::gaussian_gradient(g, cfg.kernel.sigma);
            case KernelSpec::Type::box:
                return InteractionKernel::box(g, cfg.kernel.half_width);
            case KernelSpec::Type::file: {
                VectorField v(g);
                const Field kx = read_snapshot(cfg.kernel.path_x);
                require_same_grid(g, kx.grid, "kernel samples");
                v.comp[0] = kx.values;
                if (g.dim == 2) {
                    const Field ky = read_snapshot(cfg.kernel.path_y);
                    require_same_grid(g, ky.grid, "kernel samples");
                    v.comp[1] = ky.values;
                }
                return InteractionKernel::from_samples(std::move(v));
            }
        }
        throw error("unreachable kernel type");
    }();

    Mobility mobility = [&] {
        switch (cfg.mobility.type) {
            case MobilitySpec::Type::polynomial:
                return Mobility::polynomial(cfg.mobility.coeffs);
            case MobilitySpec::Type::power: return Mobility::power(cfg.mobility.m);
            case MobilitySpec::Type::logistic: return Mobility::logistic();
            case MobilitySpec::Type::logistic_power:
                return Mobility::logistic_power(cfg.mobility.alpha);
        }
        throw error("unreachable mobility type");
    }();

    Problem p{g,
              std::move(u0),
              std::move(kernel),
              std::move(mobility),
              cfg.problem.epsilon,
              cfg.problem.horizon};
    p.cfl_advection = cfg.problem.cfl_advection;
    p.cfl_diffusion = cfg.problem.cfl_diffusion;
    p.blowup_threshold = cfg.problem.blowup_threshold;
    p.support_fraction = cfg.problem.support_fraction;
    validate_problem(p);
    return p;
}

int execute(const RunConfig& cfg, const std::string& config_path) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(cfg.output.dir);
    Artifacts art{fs::path(cfg.output.dir), {}};
    json notes = json::object();

    int code = exit_ok;
    if (cfg.command == "run") code = cmd_run(cfg, art, notes);
    else if (cfg.command == "rate-study") code = cmd_rate_study(cfg, art, notes);
    else if (cfg.command == "stability-study") code = cmd_stability(cfg, art, notes);
    else if (cfg.command == "verify-lemmas") code = cmd_verify_lemmas(cfg, art, notes);
    else if (cfg.command == "kuznetsov") code = cmd_kuznetsov(cfg, art, notes);
    else if (cfg.command == "bounds") code = cmd_bounds(cfg, art, notes);
    else if (cfg.command == "picard") code = cmd_picard(cfg, art, notes);
    else return exit_config_error;

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    json manifest;
    manifest["command"] = cfg.command;
    manifest["config_hash"] =
        config_path.empty() ? 0ull : fnv1a_file_hash(config_path);
    manifest["seed"] = cfg.seed;
    manifest["version"] = kVersion;
    manifest["wall_seconds"] = wall;
    manifest["outputs"] = art.names;
    manifest["notes"] = notes;
    std::ofstream mf(art.dir / "manifest.json", std::ios::binary);
    if (!mf) throw error("cannot write manifest.json");
    mf << manifest.dump(2) << "\n";

    return code;
}

}  // namespace nlclaw
