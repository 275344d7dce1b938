#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <omp.h>
#include <sstream>

#include "nlclaw/field_ops.hpp"
#include "nlclaw/initial_data.hpp"
#include "nlclaw/solver.hpp"

using namespace nlclaw;

namespace {

Field sine_field(const Grid& g, double mean, double amp, int k) {
    Field u(g);
    const double w = 2.0 * std::numbers::pi * k / g.length;
    for (int i = 0; i < g.n; ++i) u[i] = mean + amp * std::sin(w * g.center(i));
    return u;
}

Problem sine_problem(int n, double eps, double horizon) {
    Grid g = make_grid(1, n, 1.0);
    return Problem{g,
                   sine_field(g, 0.5, 0.4, 1),
                   InteractionKernel::hks(g),
                   Mobility::logistic(),
                   eps,
                   horizon,
                   0.45,
                   0.45,
                   1e6,
                   1.0};
}

}  // namespace

TEST_CASE("cfl_dt closed forms") {
    Grid g = make_grid(1, 64, 1.0);
    // f == 0: no transport at all
    Problem p{g,   Field(g, 0.5), InteractionKernel::hks(g), Mobility::polynomial({}),
              0.0, 1.0};
    State s{0.0, p.u0, 0, false};
    CHECK(std::isinf(cfl_dt(s, p)));

    p.epsilon = 0.01;
    const double h = g.spacing();
    CHECK(cfl_dt(s, p) == p.cfl_diffusion * h * h / (2.0 * 1 * p.epsilon));

    Grid g2 = make_grid(2, 32, 1.0);
    Problem p2{g2,   Field(g2, 0.5), InteractionKernel::hks(g2),
               Mobility::polynomial({}), 0.03, 1.0};
    State s2{0.0, p2.u0, 0, false};
    const double h2 = g2.spacing();
    CHECK(cfl_dt(s2, p2) == p2.cfl_diffusion * h2 * h2 / (2.0 * 2 * p2.epsilon));
}

TEST_CASE("cfl_dt advective part recomputed independently") {
    Problem p = sine_problem(64, 0.0, 1.0);
    State s{0.0, p.u0, 0, false};

    std::vector<double> f(p.u0.size()), fp(p.u0.size());
    p.mobility.eval_arrays(p.u0.values, f, fp);
    ForceEval fe = convolve(p.kernel, p.u0);
    double speed = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        speed = std::max(speed, std::abs(fp[i] * fe.force.comp[0][i]));
    double src = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        src = std::max(src, std::abs(f[i] * fe.div_force[i]));
    const double h = p.grid.spacing();
    const double expected = p.cfl_advection * h / (speed + h * src);
    CHECK(cfl_dt(s, p) == expected);
}

TEST_CASE("march conserves mass at every step") {
    Problem p = sine_problem(128, 1e-3, 0.1);
    const double m0 = mass(p.u0);
    RunResult r = run(p, std::vector<double>{0.05, 0.1});
    REQUIRE(r.diagnostics.size() > 5);
    for (const auto& row : r.diagnostics)
        CHECK(std::abs(row.mass - m0) <= 1e-13 * std::abs(m0));
    CHECK(r.snapshots.size() == 2);
}

TEST_CASE("constant states are fixed points of the step") {
    Grid g = make_grid(1, 128, 1.0);
    Problem p{g,    Field(g, 0.4), InteractionKernel::hks(g), Mobility::logistic(),
              0.02, 0.05};
    RunResult r = run(p, std::vector<double>{0.05});
    REQUIRE(r.snapshots.size() == 1);
    CHECK(distance_linf(r.snapshots[0].u, p.u0) <= 1e-13);
}

TEST_CASE("spectral heat semigroup") {
    Grid g = make_grid(1, 256, 2.0);
    const int k = 3;
    Field u = sine_field(g, 0.0, 1.0, k);
    const double eps = 0.07, t = 0.3;
    const double xi = 2.0 * std::numbers::pi * k / g.length;
    const double factor = std::exp(-eps * xi * xi * t);
    Field out = heat_evolve(u, eps, t);
    for (int i = 0; i < g.n; ++i)
        CHECK(out[i] == doctest::Approx(factor * u[i]).epsilon(1e-12));

    // semigroup property and the trivial endpoints
    Field two_hops = heat_evolve(heat_evolve(u, eps, 0.1), eps, 0.2);
    CHECK(distance_linf(two_hops, out) <= 1e-13);
    CHECK(distance_linf(heat_evolve(u, 0.0, 5.0), u) <= 1e-13);
    CHECK(distance_linf(heat_evolve(u, eps, 0.0), u) <= 1e-13);
    CHECK_THROWS_AS(heat_evolve(u, -1.0, 1.0), unsupported_error);
    CHECK_THROWS_AS(heat_evolve(u, 1.0, -1.0), unsupported_error);
}

TEST_CASE("zero mobility reduces the march to explicit diffusion") {
    Grid g = make_grid(1, 128, 1.0);
    Problem p{g,    sine_field(g, 0.3, 0.2, 1), InteractionKernel::hks(g),
              Mobility::polynomial({}), 0.05, 0.2};
    RunResult r = run(p, std::vector<double>{0.2});
    REQUIRE(r.snapshots.size() == 1);
    Field exact = heat_evolve(p.u0, p.epsilon, 0.2);
    // three-point Laplacian vs spectral symbol: O(h^2) on the resolved mode
    CHECK(distance_linf(r.snapshots[0].u, exact) <= 1e-4);
}

TEST_CASE("fixed-point iteration with zero mobility") {
    Problem p = sine_problem(64, 0.05, 1.0);
    p.mobility = Mobility::polynomial({});
    PicardResult pr = picard_iterate(p, 0.02, 4, 32);
    REQUIRE(pr.contraction_factors.size() == 3);
    CHECK(pr.contraction_factors[0] == 0.0);  // forcing ignores the iterate
    CHECK(pr.contractive);
    CHECK(std::isinf(pr.threshold));
    Field exact = heat_evolve(p.u0, p.epsilon, 0.02);
    CHECK(distance_linf(pr.terminal, exact) <= 1e-12);
}

TEST_CASE("fixed-point iteration agrees with the march") {
    Problem p = sine_problem(64, 0.05, 1.0);
    const double t_short = 0.01;
    PicardResult pr = picard_iterate(p, t_short, 5, 64);
    CHECK(pr.contractive);
    CHECK(pr.threshold > 0.0);
    RunResult r = run(p, std::vector<double>{t_short});
    REQUIRE(r.snapshots.size() == 1);
    const double d = distance_l1(pr.terminal, r.snapshots[0].u);
    CHECK(d <= 1e-3 * norm_l1(p.u0));
}

TEST_CASE("threshold crossing truncates the march") {
    Problem p = sine_problem(128, 1e-3, 0.5);
    p.blowup_threshold = 0.7;  // below max u0 = 0.9, so the first step trips it
    RunResult r = run(p, std::vector<double>{0.25, 0.5});
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].blown_up);
    CHECK(std::isnan(r.diagnostics[0].entropy_residual_max));
    REQUIRE(r.snapshots.size() == 1);
    CHECK(r.snapshots.back().blown_up);
    auto rep = detect_blowup(r.diagnostics, p);
    REQUIRE(rep.has_value());
    CHECK(rep->time == r.diagnostics[0].t);
    CHECK(rep->linf > 0.7);

    Problem q = sine_problem(64, 1e-3, 0.05);
    RunResult rq = run(q, std::vector<double>{0.05});
    CHECK(!detect_blowup(rq.diagnostics, q).has_value());
}

TEST_CASE("snapshots land exactly on the requested times") {
    Problem p = sine_problem(64, 1e-3, 0.1);
    const std::vector<double> times{0.0, 0.0371, 0.1};
    RunResult r = run(p, times);
    REQUIRE(r.snapshots.size() == 3);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(r.snapshots[i].time == times[i]);
    CHECK(r.snapshots[0].u.values == p.u0.values);
    CHECK(r.snapshots[0].step_count == 0);
    CHECK(r.snapshots[2].step_count == r.diagnostics.size());
}

TEST_CASE("march and step validate their inputs") {
    Problem p = sine_problem(32, 1e-3, 0.1);
    CHECK_THROWS_AS(run(p, std::vector<double>{-0.1}), unsupported_error);
    CHECK_THROWS_AS(run(p, std::vector<double>{0.2}), unsupported_error);
    CHECK_THROWS_AS(run(p, std::vector<double>{0.05, 0.05}), unsupported_error);

    State s{0.0, p.u0, 0, false};
    CHECK_THROWS_AS(step(s, p, 0.0), unsupported_error);
    CHECK_THROWS_AS(step(s, p, -1e-3), unsupported_error);

    Problem bad = p;
    bad.cfl_advection = 0.0;
    CHECK_THROWS_AS(run(bad, std::vector<double>{0.1}), unsupported_error);
    bad = p;
    bad.epsilon = -1.0;
    CHECK_THROWS_AS(run(bad, std::vector<double>{0.1}), unsupported_error);
    bad = p;
    bad.u0[3] = std::nan("");
    CHECK_THROWS_AS(run(bad, std::vector<double>{0.1}), invalid_field_error);
    bad = p;
    bad.kernel = InteractionKernel::hks(make_grid(1, 64, 1.0));
    CHECK_THROWS_AS(run(bad, std::vector<double>{0.1}), shape_error);
    bad = p;
    bad.mobility = Mobility::power(2.0);
    bad.u0 = sine_field(p.grid, 0.0, 0.5, 1);  // dips negative
    CHECK_THROWS_AS(run(bad, std::vector<double>{0.1}), unsupported_error);

    CHECK_THROWS_AS(picard_iterate(sine_problem(32, 0.0, 0.1), 0.05, 3),
                    unsupported_error);
    CHECK_THROWS_AS(picard_iterate(p, 0.0, 3), unsupported_error);
    CHECK_THROWS_AS(picard_iterate(p, 0.05, 0), unsupported_error);
}

TEST_CASE("trajectories are bitwise reproducible across thread counts") {
    Problem p = sine_problem(128, 1e-3, 0.08);
    const std::vector<double> times{0.04, 0.08};
    omp_set_num_threads(2);
    RunResult a = run(p, times);
    omp_set_num_threads(5);
    RunResult b = run(p, times);
    omp_set_num_threads(omp_get_num_procs());
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i)
        CHECK(a.snapshots[i].u.values == b.snapshots[i].u.values);
    REQUIRE(a.diagnostics.size() == b.diagnostics.size());
    for (std::size_t i = 0; i < a.diagnostics.size(); ++i) {
        CHECK(a.diagnostics[i].t == b.diagnostics[i].t);
        CHECK(a.diagnostics[i].mass == b.diagnostics[i].mass);
        CHECK(a.diagnostics[i].tv == b.diagnostics[i].tv);
        CHECK(a.diagnostics[i].entropy_residual_max ==
              b.diagnostics[i].entropy_residual_max);
    }
}

TEST_CASE("diagnostics CSV format") {
    Problem p = sine_problem(32, 1e-3, 0.02);
    RunResult r = run(p, std::vector<double>{0.02});
    const std::string path = "/tmp/nlclaw_test_diag.csv";
    write_diagnostics_csv(path, r.diagnostics);
    std::ifstream in(path);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header == "t,dt,mass,l1,linf,tv,entropy_residual_max,force_linf,blown_up");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == r.diagnostics.size());

    // a rewrite is byte-identical
    std::ostringstream first;
    first << std::ifstream(path).rdbuf();
    write_diagnostics_csv(path, r.diagnostics);
    std::ostringstream second;
    second << std::ifstream(path).rdbuf();
    CHECK(first.str() == second.str());
    std::remove(path.c_str());
}

TEST_CASE("compact-support monitoring") {
    Grid g = make_grid(1, 256, 1.0);
    U0Spec bump;
    bump.kind = U0Spec::Kind::gaussian_bump;
    bump.bump_amplitude = 1.0;
    bump.width = 0.03;
    Problem p{g,    build_u0(g, bump), InteractionKernel::hks(g), Mobility::logistic(),
              1e-4, 0.01,              0.45,
              0.45, 1e6,               0.5};
    RunResult ok = run(p, std::vector<double>{0.0, 0.01});
    CHECK(ok.support_ok);

    p.u0 = sine_field(g, 0.5, 0.4, 1);  // fills the whole torus
    RunResult bad = run(p, std::vector<double>{0.0, 0.01});
    CHECK(!bad.support_ok);
}
